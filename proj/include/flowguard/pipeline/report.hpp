#pragma once

// Self-contained HTML report (inline CSS and SVG, no external references).

#include <sstream>
#include <string>

#include "flowguard/eda.hpp"
#include "flowguard/metrics.hpp"
#include "flowguard/pipeline/summary.hpp"
#include "flowguard/pipeline/workspace.hpp"
#include "flowguard/text.hpp"

namespace flowguard::pipeline {

namespace detail {

inline constexpr const char* report_css = R"(body{font-family:sans-serif;margin:2em auto;max-width:1100px;color:#222}
h1{font-size:1.6em}h2{font-size:1.25em;border-bottom:1px solid #ccc;padding-bottom:.2em;margin-top:1.6em}
table{border-collapse:collapse;margin:.6em 0}th,td{border:1px solid #ccc;padding:.3em .7em;text-align:right}
th:first-child,td:first-child{text-align:left}thead th{background:#f0f0f0}
.figures{display:flex;flex-wrap:wrap;gap:1em}.note{color:#666;font-style:italic}
dl.provenance{display:grid;grid-template-columns:max-content auto;gap:.2em 1em}dt{font-weight:bold}
code{font-size:.9em})";

inline std::string class_label(const RunSummary& s, ClassCode c) {
    const auto i = static_cast<std::size_t>(c);
    return c >= 0 && i < s.class_names.size() ? s.class_names[i] : std::to_string(c);
}

}  // namespace detail

/// Renders the report. Every value comes from the summary, so identical
/// summaries give byte-identical HTML.
inline std::string render_html_report(const RunSummary& s) {
    using text::html_escape;
    std::ostringstream o;
    o << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
      << "<title>Flow anomaly detection report</title>\n<style>\n" << detail::report_css << "\n</style>\n"
      << "</head>\n<body>\n<h1>Flow anomaly detection report</h1>\n";

    o << "<h2>Run provenance</h2>\n<dl class=\"provenance\">\n";
    auto item = [&](const std::string& k, const std::string& v) {
        o << "<dt>" << html_escape(k) << "</dt><dd>" << html_escape(v) << "</dd>\n";
    };
    item("Dataset", s.dataset);
    item("Input SHA-256", s.input_hash);
    item("Config hash", s.config_hash);
    item("Seed", std::to_string(s.seed));
    item("Split seed", std::to_string(s.split_seed));
    item("Target", s.target);
    item("Rows", std::to_string(s.rows) + (s.skipped_rows ? " (" + std::to_string(s.skipped_rows) + " malformed rows skipped)" : ""));
    item("Train / test rows", std::to_string(s.train_rows) + " / " + std::to_string(s.test_rows) + " (test fraction " +
                                  text::format_real(s.test_fraction) + ")");
    item("SMOTE", s.smote ? "on training rows, k = " + std::to_string(s.smote_k) + ", " +
                                std::to_string(s.synthetic_rows) + " synthetic rows"
                          : "off");
    item("Feature scaling", s.scaled ? "standardised on training rows" : "none");
    std::string feats;
    for (const auto& f : s.features) feats += (feats.empty() ? "" : ", ") + f;
    item("Features", feats);
    item("Generated", s.created_at);
    o << "</dl>\n";

    o << "<h2>Model comparison</h2>\n<table class=\"comparison\">\n<thead><tr><th>ML Model</th><th>Accuracy</th>"
      << "<th>Precision</th><th>Recall</th><th>F1-score</th></tr></thead>\n<tbody>\n";
    for (const auto& r : s.comparison.rows)
        o << "<tr class=\"model-row\"><td>" << html_escape(r.model) << "</td><td>" << text::format_fixed(r.accuracy, 12)
          << "</td><td>" << text::format_fixed(r.precision, 2) << "</td><td>" << text::format_fixed(r.recall, 2)
          << "</td><td>" << text::format_fixed(r.f1, 2) << "</td></tr>\n";
    o << "</tbody>\n</table>\n<p class=\"note\">Precision, recall and F1 are support-weighted averages over "
         "classes on the held-out test rows.</p>\n";

    o << "<h2>Per-model detail</h2>\n";
    for (const auto& m : s.models) {
        const auto& r = m.report;
        o << "<h3>" << html_escape(m.name) << "</h3>\n<p>Training accuracy "
          << text::format_fixed(m.train_accuracy, 4) << ", test accuracy " << text::format_fixed(r.accuracy, 4)
          << ".</p>\n<table class=\"per-class\">\n<thead><tr><th>Class</th><th>Precision</th><th>Recall</th>"
          << "<th>F1</th><th>Support</th></tr></thead>\n<tbody>\n";
        for (const auto& [c, cs] : r.per_class)
            o << "<tr><td>" << html_escape(detail::class_label(s, c)) << "</td><td>" << text::format_fixed(cs.precision, 4)
              << "</td><td>" << text::format_fixed(cs.recall, 4) << "</td><td>" << text::format_fixed(cs.f1, 4)
              << "</td><td>" << cs.support << "</td></tr>\n";
        o << "</tbody>\n</table>\n<table class=\"confusion\">\n<thead><tr><th>true \\ predicted</th>";
        for (auto c : r.confusion.classes) o << "<th>" << html_escape(detail::class_label(s, c)) << "</th>";
        o << "</tr></thead>\n<tbody>\n";
        for (std::size_t i = 0; i < r.confusion.classes.size(); ++i) {
            o << "<tr><td>" << html_escape(detail::class_label(s, r.confusion.classes[i])) << "</td>";
            for (auto n : r.confusion.counts[i]) o << "<td>" << n << "</td>";
            o << "</tr>\n";
        }
        o << "</tbody>\n</table>\n";
    }

    o << "<h2>Class distribution</h2>\n";
    if (s.eda) {
        o << "<div class=\"figures\">\n" << class_distribution_svg(s.eda->class_distribution, s.class_names) << "</div>\n";
    } else {
        o << "<p class=\"note\">Exploratory analysis was disabled for this run; class distribution omitted.</p>\n";
    }

    o << "<h2>Feature histograms</h2>\n";
    if (s.eda && !s.eda->histograms.empty()) {
        o << "<div class=\"figures\">\n";
        for (const auto& h : s.eda->histograms) o << histogram_svg(h);
        o << "</div>\n";
    } else {
        o << "<p class=\"note\">Exploratory analysis was disabled for this run; histograms omitted.</p>\n";
    }

    o << "<h2>Feature correlation</h2>\n";
    if (s.eda && s.eda->correlation) {
        o << "<div class=\"figures\">\n" << correlation_svg(*s.eda->correlation) << "</div>\n";
        if (!s.eda->correlation->degenerate.empty()) {
            o << "<p class=\"note\">Constant columns (correlation undefined, shown as 0):";
            for (const auto& d : s.eda->correlation->degenerate) o << ' ' << html_escape(d);
            o << "</p>\n";
        }
    } else {
        o << "<p class=\"note\">Correlation analysis was not run.</p>\n";
    }
    if (s.dropped.empty()) {
        o << "<p>No feature pair reached |r| &ge; " << text::format_real(s.correlation_threshold)
          << "; all selected features were kept.</p>\n";
    } else {
        o << "<p>Dropped for |r| &ge; " << text::format_real(s.correlation_threshold) << ":</p>\n<ul>\n";
        for (const auto& d : s.dropped)
            o << "<li>" << html_escape(d.name) << " (r = " << text::format_fixed(d.r, 3) << " with "
              << html_escape(d.partner) << ")</li>\n";
        o << "</ul>\n";
    }

    o << "<h2>Pipeline steps</h2>\n<table class=\"steps\">\n<thead><tr><th>Step</th><th>Status</th></tr></thead>\n<tbody>\n";
    for (const auto& st : s.steps)
        o << "<tr><td>" << html_escape(st.name) << "</td><td>" << html_escape(st.status) << "</td></tr>\n";
    o << "</tbody>\n</table>\n</body>\n</html>\n";
    return o.str();
}

inline constexpr const char* summary_file = "summary.json";
inline constexpr const char* report_file = "index.html";

inline RunSummary load_summary(const Workspace& ws) {
    const auto path = ws.path(Stage::results, summary_file);
    if (!std::filesystem::exists(path) || !ws.manifest(Stage::results).find(summary_file))
        throw MissingResults("results stage has no run summary; run the pipeline first");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(Workspace::read_bytes(path));
    } catch (const nlohmann::json::exception& e) {
        throw MissingResults(std::string("run summary is not valid JSON: ") + e.what());
    }
    return summary_from_json(j);
}

/// Writes report/index.html from the results stage and records it.
inline std::filesystem::path emit_report(const Workspace& ws, const RunSummary& summary, const std::string& timestamp) {
    ws.write(Stage::report, report_file, render_html_report(summary), "report", summary.config_hash, timestamp);
    return ws.path(Stage::report, report_file);
}

inline std::filesystem::path emit_report(const Workspace& ws, const std::string& timestamp) {
    return emit_report(ws, load_summary(ws), timestamp);
}

}  // namespace flowguard::pipeline
