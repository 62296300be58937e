#pragma once

// Stratified train/test splitting and SMOTE oversampling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "flowguard/errors.hpp"
#include "flowguard/flowdata.hpp"
#include "flowguard/random.hpp"

namespace flowguard {

inline constexpr double default_test_fraction = 0.2;
inline constexpr std::size_t default_smote_k = 5;

struct SplitIndices {
    std::vector<std::size_t> train;  // ascending
    std::vector<std::size_t> test;   // ascending
    std::uint64_t seed = 0;
    double test_fraction = default_test_fraction;

    bool operator==(const SplitIndices&) const = default;
};

/// Per class, rows are shuffled with the split stream of `seed` and the first
/// round(count * fraction) go to test. Classes are visited in ascending code
/// order from a single generator, so the result depends only on (y, seed).
inline SplitIndices stratified_split(const LabelVector& y, double test_fraction, std::uint64_t seed) {
    if (y.values.empty()) throw EmptyLabels("cannot split an empty label vector");
    if (!(test_fraction >= 0 && test_fraction < 1)) throw InvalidArgument("test fraction must lie in [0, 1)");

    std::map<ClassCode, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < y.values.size(); ++i) members[y.values[i]].push_back(i);

    Rng rng(derive_seed(seed, streams::split));
    SplitIndices out;
    out.seed = seed;
    out.test_fraction = test_fraction;
    for (auto& [cls, rows] : members) {
        rng.shuffle(std::span(rows));
        const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(rows.size()) * test_fraction));
        out.test.insert(out.test.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_test));
        out.train.insert(out.train.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_test), rows.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

inline nlohmann::json split_to_json(const SplitIndices& s) {
    return {{"seed", s.seed}, {"test_fraction", s.test_fraction}, {"train", s.train}, {"test", s.test}};
}

inline SplitIndices split_from_json(const nlohmann::json& j) {
    try {
        SplitIndices s;
        s.seed = j.at("seed").get<std::uint64_t>();
        s.test_fraction = j.at("test_fraction").get<double>();
        s.train = j.at("train").get<std::vector<std::size_t>>();
        s.test = j.at("test").get<std::vector<std::size_t>>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed split file: ") + e.what());
    }
}

struct SyntheticOrigin {
    std::size_t base = 0;
    std::size_t neighbor = 0;

    bool operator==(const SyntheticOrigin&) const = default;
};

struct ResampledSet {
    FeatureMatrix X;
    LabelVector y;
    /// One entry per synthetic row; synthetic rows follow the originals.
    std::vector<SyntheticOrigin> synthetic_from;
    std::uint64_t seed = 0;
    /// Set when the input holds a single class and nothing was balanced.
    bool single_class = false;

    std::size_t original_rows() const { return X.rows - synthetic_from.size(); }
};

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

/// The k nearest rows to `base` among `members` (base excluded), ordered by
/// distance then row index.
inline std::vector<std::size_t> nearest_within(const FeatureMatrix& X, std::span<const std::size_t> members,
                                               std::size_t base, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> d;
    d.reserve(members.size());
    const auto b = X.row(base);
    for (auto m : members)
        if (m != base) d.emplace_back(squared_distance(b, X.row(m)), m);
    k = std::min(k, d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = d[i].second;
    return out;
}

}  // namespace detail

/// Oversamples every class up to the majority count. Each synthetic row is
/// base + u * (neighbor - base) with the base drawn uniformly from its class,
/// the neighbor drawn from the base's k nearest same-class rows (Euclidean)
/// and u uniform in [0, 1). A singleton class is duplicated verbatim.
inline ResampledSet smote(const FeatureMatrix& X, const LabelVector& y, std::size_t k, std::uint64_t seed) {
    if (X.rows != y.size()) throw DimensionMismatch("feature rows and labels differ in length");
    if (k == 0) throw InvalidArgument("SMOTE k must be positive");

    ResampledSet out{X, y, {}, seed, false};
    std::map<ClassCode, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < y.values.size(); ++i) members[y.values[i]].push_back(i);
    if (members.size() < 2) {
        out.single_class = true;
        return out;
    }
    std::size_t majority = 0;
    for (const auto& [cls, rows] : members) majority = std::max(majority, rows.size());

    Rng rng(derive_seed(seed, streams::smote));
    std::vector<double> synthetic(X.cols());
    for (const auto& [cls, rows] : members) {
        if (rows.size() == majority) continue;
        const std::size_t need = majority - rows.size();
        const std::size_t k_eff = std::min(k, rows.size() - 1);
        std::unordered_map<std::size_t, std::vector<std::size_t>> neighbor_cache;
        for (std::size_t s = 0; s < need; ++s) {
            const std::size_t base = rows[rng.below(rows.size())];
            std::size_t neighbor = base;
            double u = 0;
            if (k_eff > 0) {
                auto it = neighbor_cache.find(base);
                if (it == neighbor_cache.end())
                    it = neighbor_cache.emplace(base, detail::nearest_within(X, rows, base, k_eff)).first;
                neighbor = it->second[rng.below(it->second.size())];
                u = rng.uniform();
            }
            const auto b = X.row(base);
            const auto nb = X.row(neighbor);
            for (std::size_t j = 0; j < X.cols(); ++j) {
                const double v = b[j] + u * (nb[j] - b[j]);
                synthetic[j] = std::clamp(v, std::min(b[j], nb[j]), std::max(b[j], nb[j]));
            }
            out.X.append_row(synthetic);
            out.y.values.push_back(cls);
            out.synthetic_from.push_back({base, neighbor});
        }
    }
    return out;
}

}  // namespace flowguard
