#pragma once

// Exploratory analysis: equal-width histograms, class counts, Pearson
// correlation and threshold-based dropping of redundant features.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "flowguard/errors.hpp"
#include "flowguard/flowdata.hpp"
#include "flowguard/svg.hpp"
#include "flowguard/text.hpp"

namespace flowguard {

inline constexpr std::size_t default_histogram_bins = 30;
inline constexpr double default_correlation_threshold = 0.9;

struct Histogram {
    std::string column;
    std::vector<double> bin_edges;  // b + 1 ascending
    std::vector<std::size_t> counts;

    std::size_t total() const {
        std::size_t t = 0;
        for (auto c : counts) t += c;
        return t;
    }
};

/// Equal-width bins over [min, max] of the finite values; the last bin is
/// closed on the right. A constant input yields one unit-width bin centred
/// on the value.
inline Histogram histogram(std::span<const double> values, std::size_t bins, std::string column = {}) {
    if (bins == 0) throw InvalidArgument("histogram needs at least one bin");
    double lo = 0, hi = 0;
    std::size_t finite = 0;
    for (double v : values) {
        if (!std::isfinite(v)) continue;
        if (finite++ == 0) {
            lo = hi = v;
        } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (finite == 0) throw EmptyInput("histogram of an empty column");

    Histogram h{std::move(column), {}, {}};
    if (lo == hi) {
        h.bin_edges = {lo - 0.5, lo + 0.5};
        h.counts = {finite};
        return h;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    h.bin_edges.resize(bins + 1);
    for (std::size_t k = 0; k < bins; ++k) h.bin_edges[k] = lo + width * static_cast<double>(k);
    h.bin_edges[bins] = hi;
    h.counts.assign(bins, 0);
    for (double v : values) {
        if (!std::isfinite(v)) continue;
        auto k = static_cast<std::size_t>(std::floor((v - lo) / width));
        if (k >= bins) k = bins - 1;
        // Guard against rounding putting v on the wrong side of an edge.
        while (k > 0 && v < h.bin_edges[k]) --k;
        while (k + 1 < bins && v >= h.bin_edges[k + 1]) ++k;
        ++h.counts[k];
    }
    return h;
}

inline std::map<ClassCode, std::size_t> class_distribution(const LabelVector& y) {
    std::map<ClassCode, std::size_t> out;
    for (auto v : y.values) ++out[v];
    return out;
}

struct CorrelationMatrix {
    std::vector<std::string> names;
    std::vector<std::vector<double>> r;
    std::vector<std::string> degenerate;

    std::size_t size() const { return names.size(); }
    bool is_degenerate(std::string_view name) const {
        return std::find(degenerate.begin(), degenerate.end(), name) != degenerate.end();
    }
};

/// Pearson r with population normalisation. Constant columns are reported
/// as degenerate and correlate 0 with everything, themselves included.
inline CorrelationMatrix pearson(const FeatureMatrix& X) {
    if (X.rows < 2) throw TooFewRows("correlation needs at least two rows");
    const std::size_t d = X.cols(), n = X.rows;
    std::vector<std::vector<double>> centered(d, std::vector<double>(n));
    std::vector<double> norm(d, 0.0);
    std::vector<bool> constant(d, true);
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0;
        for (std::size_t i = 0; i < n; ++i) {
            mean += X.at(i, j);
            if (X.at(i, j) != X.at(0, j)) constant[j] = false;
        }
        mean /= static_cast<double>(n);
        double ss = 0;
        for (std::size_t i = 0; i < n; ++i) {
            centered[j][i] = X.at(i, j) - mean;
            ss += centered[j][i] * centered[j][i];
        }
        norm[j] = std::sqrt(ss);
        if (norm[j] == 0) constant[j] = true;
    }

    CorrelationMatrix C{X.names, std::vector<std::vector<double>>(d, std::vector<double>(d, 0.0)), {}};
    for (std::size_t j = 0; j < d; ++j)
        if (constant[j]) C.degenerate.push_back(X.names[j]);
    for (std::size_t a = 0; a < d; ++a) {
        if (constant[a]) continue;
        C.r[a][a] = 1.0;
        for (std::size_t b = a + 1; b < d; ++b) {
            if (constant[b]) continue;
            double cov = 0;
            for (std::size_t i = 0; i < n; ++i) cov += centered[a][i] * centered[b][i];
            // The 1/n factors cancel between covariance and the deviations.
            const double r = std::clamp(cov / (norm[a] * norm[b]), -1.0, 1.0);
            C.r[a][b] = C.r[b][a] = r;
        }
    }
    return C;
}

struct DroppedFeature {
    std::string name;
    std::string partner;
    double r = 0;
};

struct FeatureSelection {
    std::vector<std::string> kept;
    std::vector<DroppedFeature> dropped;
    double threshold = default_correlation_threshold;
};

/// Scans pairs (i, j), i < j, in column order; when |r| >= threshold and
/// both are still kept, the later column j is dropped.
inline FeatureSelection drop_correlated(const CorrelationMatrix& C, double threshold = default_correlation_threshold) {
    if (!(threshold > 0 && threshold <= 1)) throw InvalidArgument("correlation threshold must lie in (0, 1]");
    const std::size_t d = C.size();
    std::vector<bool> dropped(d, false);
    FeatureSelection sel;
    sel.threshold = threshold;
    for (std::size_t i = 0; i < d; ++i) {
        if (dropped[i]) continue;
        for (std::size_t j = i + 1; j < d; ++j) {
            if (dropped[j]) continue;
            if (std::abs(C.r[i][j]) >= threshold) {
                dropped[j] = true;
                sel.dropped.push_back({C.names[j], C.names[i], C.r[i][j]});
            }
        }
    }
    for (std::size_t i = 0; i < d; ++i)
        if (!dropped[i]) sel.kept.push_back(C.names[i]);
    return sel;
}

// ---------------------------------------------------------------------------
// Export

inline std::string histogram_csv(const Histogram& h) {
    std::ostringstream o;
    o << "bin_left,bin_right,count\n";
    for (std::size_t k = 0; k < h.counts.size(); ++k)
        o << text::format_real(h.bin_edges[k]) << ',' << text::format_real(h.bin_edges[k + 1]) << ','
          << h.counts[k] << '\n';
    return o.str();
}

inline std::string correlation_csv(const CorrelationMatrix& C) {
    std::ostringstream o;
    o << "feature";
    for (const auto& n : C.names) o << ',' << csv::quote(n);
    o << '\n';
    for (std::size_t i = 0; i < C.size(); ++i) {
        o << csv::quote(C.names[i]);
        for (std::size_t j = 0; j < C.size(); ++j) o << ',' << text::format_real(C.r[i][j]);
        o << '\n';
    }
    return o.str();
}

inline std::string histogram_svg(const Histogram& h) {
    std::vector<svg::Bar> bars;
    for (std::size_t k = 0; k < h.counts.size(); ++k)
        bars.push_back({"[" + text::format_real(h.bin_edges[k]) + ", " + text::format_real(h.bin_edges[k + 1]) +
                            (k + 1 == h.counts.size() ? "]" : ")"),
                        static_cast<double>(h.counts[k])});
    return svg::bar_chart("Distribution of " + h.column, bars, text::format_real(h.bin_edges.front()),
                          text::format_real(h.bin_edges.back()));
}

inline std::string class_distribution_svg(const std::map<ClassCode, std::size_t>& dist,
                                          const std::vector<std::string>& class_names = {}) {
    std::vector<svg::Bar> bars;
    for (const auto& [cls, count] : dist) {
        const auto idx = static_cast<std::size_t>(cls);
        std::string label = cls >= 0 && idx < class_names.size() ? class_names[idx] : std::to_string(cls);
        bars.push_back({label, static_cast<double>(count)});
    }
    return svg::bar_chart("Class distribution", bars);
}

inline std::string correlation_svg(const CorrelationMatrix& C) {
    return svg::heatmap("Feature correlation (Pearson r)", C.names, C.r);
}

}  // namespace flowguard
