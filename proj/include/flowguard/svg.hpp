#pragma once

// Minimal standalone SVG charts: bar charts and annotated heatmaps. Output
// is a pure function of the inputs so reports can be compared byte-for-byte.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "flowguard/text.hpp"

namespace flowguard::svg {

inline std::string num(double v) { return text::format_fixed(v, 2); }

struct Bar {
    std::string label;
    double value = 0;
};

/// Vertical bars with category labels under each bar. `axis_labels` set to
/// false leaves the x axis unlabelled except for the first and last tick
/// text, which suits dense histograms.
inline std::string bar_chart(const std::string& title, const std::vector<Bar>& bars, std::string first_tick = {},
                             std::string last_tick = {}, int width = 480, int height = 260) {
    const double margin_left = 56, margin_right = 16, margin_top = 32, margin_bottom = 48;
    const double plot_w = width - margin_left - margin_right;
    const double plot_h = height - margin_top - margin_bottom;
    double peak = 0;
    for (const auto& b : bars) peak = std::max(peak, b.value);
    if (peak <= 0) peak = 1;

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<title>" << text::html_escape(title) << "</title>\n";
    o << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">"
      << text::html_escape(title) << "</text>\n";
    o << "<line x1=\"" << num(margin_left) << "\" y1=\"" << num(margin_top + plot_h) << "\" x2=\""
      << num(margin_left + plot_w) << "\" y2=\"" << num(margin_top + plot_h) << "\" stroke=\"#333\"/>\n";
    o << "<line x1=\"" << num(margin_left) << "\" y1=\"" << num(margin_top) << "\" x2=\"" << num(margin_left)
      << "\" y2=\"" << num(margin_top + plot_h) << "\" stroke=\"#333\"/>\n";
    o << "<text x=\"" << num(margin_left - 6) << "\" y=\"" << num(margin_top + 4)
      << "\" text-anchor=\"end\">" << text::format_real(peak) << "</text>\n";
    o << "<text x=\"" << num(margin_left - 6) << "\" y=\"" << num(margin_top + plot_h)
      << "\" text-anchor=\"end\">0</text>\n";

    const bool dense = !first_tick.empty() || !last_tick.empty();
    const double slot = bars.empty() ? plot_w : plot_w / static_cast<double>(bars.size());
    const double gap = dense ? 0.0 : std::min(8.0, slot * 0.2);
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const double h = plot_h * bars[i].value / peak;
        const double x = margin_left + slot * static_cast<double>(i) + gap / 2;
        o << "<rect x=\"" << num(x) << "\" y=\"" << num(margin_top + plot_h - h) << "\" width=\""
          << num(std::max(slot - gap, 0.5)) << "\" height=\"" << num(h)
          << "\" fill=\"#4c72b0\" stroke=\"#fff\" stroke-width=\"0.5\"><title>"
          << text::html_escape(bars[i].label) << ": " << text::format_real(bars[i].value) << "</title></rect>\n";
        if (!dense)
            o << "<text x=\"" << num(x + (slot - gap) / 2) << "\" y=\"" << num(margin_top + plot_h + 16)
              << "\" text-anchor=\"middle\">" << text::html_escape(bars[i].label) << "</text>\n";
    }
    if (dense) {
        o << "<text x=\"" << num(margin_left) << "\" y=\"" << num(margin_top + plot_h + 16)
          << "\" text-anchor=\"start\">" << text::html_escape(first_tick) << "</text>\n";
        o << "<text x=\"" << num(margin_left + plot_w) << "\" y=\"" << num(margin_top + plot_h + 16)
          << "\" text-anchor=\"end\">" << text::html_escape(last_tick) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

/// Diverging blue-white-red colour for a value in [-1, 1].
inline std::string diverging_color(double r) {
    r = std::clamp(r, -1.0, 1.0);
    const double lo[3] = {59, 76, 192}, mid[3] = {247, 247, 247}, hi[3] = {180, 4, 38};
    const double* end = r < 0 ? lo : hi;
    const double t = std::abs(r);
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(mid[0] + (end[0] - mid[0]) * t)),
                  static_cast<int>(std::lround(mid[1] + (end[1] - mid[1]) * t)),
                  static_cast<int>(std::lround(mid[2] + (end[2] - mid[2]) * t)));
    return buf;
}

/// Square heatmap with each cell annotated to two decimals.
inline std::string heatmap(const std::string& title, const std::vector<std::string>& names,
                           const std::vector<std::vector<double>>& r) {
    const double cell = 64, left = 120, top = 40;
    const auto d = names.size();
    const int width = static_cast<int>(left + cell * static_cast<double>(d) + 16);
    const int height = static_cast<int>(top + cell * static_cast<double>(d) + 90);
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<title>" << text::html_escape(title) << "</title>\n";
    o << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">"
      << text::html_escape(title) << "</text>\n";
    for (std::size_t i = 0; i < d; ++i) {
        const double y = top + cell * static_cast<double>(i);
        o << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y + cell / 2 + 4) << "\" text-anchor=\"end\">"
          << text::html_escape(names[i]) << "</text>\n";
        for (std::size_t j = 0; j < d; ++j) {
            const double x = left + cell * static_cast<double>(j);
            const double v = r[i][j];
            o << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(cell) << "\" height=\""
              << num(cell) << "\" fill=\"" << diverging_color(v) << "\" stroke=\"#fff\"/>\n";
            o << "<text x=\"" << num(x + cell / 2) << "\" y=\"" << num(y + cell / 2 + 4)
              << "\" text-anchor=\"middle\" fill=\"" << (std::abs(v) > 0.6 ? "#fff" : "#222") << "\">"
              << text::format_fixed(v, 2) << "</text>\n";
        }
    }
    const double label_y = top + cell * static_cast<double>(d) + 14;
    for (std::size_t j = 0; j < d; ++j) {
        const double x = left + cell * static_cast<double>(j) + cell / 2;
        o << "<text x=\"" << num(x) << "\" y=\"" << num(label_y) << "\" text-anchor=\"end\" transform=\"rotate(-35 "
          << num(x) << ' ' << num(label_y) << ")\">" << text::html_escape(names[j]) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace flowguard::svg
