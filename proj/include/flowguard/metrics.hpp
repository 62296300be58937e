#pragma once

// Confusion matrices, per-class / macro / support-weighted scores and the
// model comparison table.

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowguard/errors.hpp"
#include "flowguard/flowdata.hpp"
#include "flowguard/text.hpp"

namespace flowguard {

/// Rows are true classes, columns predicted classes, both in `classes` order.
struct ConfusionMatrix {
    std::vector<ClassCode> classes;
    std::vector<std::vector<std::size_t>> counts;

    std::size_t total() const {
        std::size_t t = 0;
        for (const auto& r : counts)
            for (auto c : r) t += c;
        return t;
    }

    bool operator==(const ConfusionMatrix&) const = default;
};

inline ConfusionMatrix confusion(std::span<const ClassCode> y_true, std::span<const ClassCode> y_pred,
                                 std::vector<ClassCode> classes) {
    if (y_true.size() != y_pred.size())
        throw LengthMismatch("y_true has " + std::to_string(y_true.size()) + " labels, y_pred has " +
                             std::to_string(y_pred.size()));
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    const std::size_t K = classes.size();
    auto index = [&](ClassCode c) {
        auto it = std::lower_bound(classes.begin(), classes.end(), c);
        if (it == classes.end() || *it != c) throw UnknownLabel("label " + std::to_string(c) + " not in class list");
        return static_cast<std::size_t>(it - classes.begin());
    };
    ConfusionMatrix cm{classes, std::vector<std::vector<std::size_t>>(K, std::vector<std::size_t>(K, 0))};
    for (std::size_t i = 0; i < y_true.size(); ++i) ++cm.counts[index(y_true[i])][index(y_pred[i])];
    return cm;
}

struct ClassScores {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    std::size_t support = 0;

    bool operator==(const ClassScores&) const = default;
};

struct AveragedScores {
    double precision = 0;
    double recall = 0;
    double f1 = 0;

    bool operator==(const AveragedScores&) const = default;
};

struct EvaluationReport {
    std::string model;
    double accuracy = 0;
    std::map<ClassCode, ClassScores> per_class;
    AveragedScores macro;
    AveragedScores weighted;
    ConfusionMatrix confusion;
    /// Classes for which some metric hit 0/0 and was defined as 0.
    std::vector<ClassCode> zero_division;

    bool operator==(const EvaluationReport&) const = default;
};

/// Precision TP/(TP+FP), recall TP/(TP+FN), F1 their harmonic mean; every 0/0
/// is 0 and flagged. Macro is the plain class mean, weighted uses support.
inline EvaluationReport score(const ConfusionMatrix& cm, std::string model = {}) {
    const std::size_t K = cm.classes.size();
    const std::size_t total = cm.total();
    if (total == 0) throw EmptyMatrix("cannot score an empty confusion matrix");

    EvaluationReport r;
    r.model = std::move(model);
    r.confusion = cm;
    std::size_t trace = 0;
    for (std::size_t c = 0; c < K; ++c) {
        const std::size_t tp = cm.counts[c][c];
        trace += tp;
        std::size_t predicted = 0, actual = 0;
        for (std::size_t o = 0; o < K; ++o) {
            predicted += cm.counts[o][c];
            actual += cm.counts[c][o];
        }
        ClassScores s;
        s.support = actual;
        bool flagged = false;
        if (predicted > 0) s.precision = static_cast<double>(tp) / static_cast<double>(predicted);
        else flagged = true;
        if (actual > 0) s.recall = static_cast<double>(tp) / static_cast<double>(actual);
        else flagged = true;
        if (s.precision + s.recall > 0) s.f1 = 2 * s.precision * s.recall / (s.precision + s.recall);
        else flagged = true;
        if (flagged) r.zero_division.push_back(cm.classes[c]);
        r.per_class[cm.classes[c]] = s;

        r.macro.precision += s.precision;
        r.macro.recall += s.recall;
        r.macro.f1 += s.f1;
        const double w = static_cast<double>(actual) / static_cast<double>(total);
        r.weighted.precision += w * s.precision;
        r.weighted.recall += w * s.recall;
        r.weighted.f1 += w * s.f1;
    }
    if (K > 0) {
        r.macro.precision /= static_cast<double>(K);
        r.macro.recall /= static_cast<double>(K);
        r.macro.f1 /= static_cast<double>(K);
    }
    r.accuracy = static_cast<double>(trace) / static_cast<double>(total);
    return r;
}

inline EvaluationReport evaluate(std::span<const ClassCode> y_true, std::span<const ClassCode> y_pred,
                                 std::vector<ClassCode> classes, std::string model = {}) {
    return score(confusion(y_true, y_pred, std::move(classes)), std::move(model));
}

inline nlohmann::json report_to_json(const EvaluationReport& r) {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& [cls, s] : r.per_class)
        per.push_back({{"class", cls}, {"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
                       {"support", s.support}});
    auto avg = [](const AveragedScores& a) {
        return nlohmann::json{{"precision", a.precision}, {"recall", a.recall}, {"f1", a.f1}};
    };
    return {{"model", r.model},
            {"accuracy", r.accuracy},
            {"per_class", per},
            {"macro", avg(r.macro)},
            {"weighted", avg(r.weighted)},
            {"confusion", {{"classes", r.confusion.classes}, {"counts", r.confusion.counts}}},
            {"zero_division", r.zero_division}};
}

inline EvaluationReport report_from_json(const nlohmann::json& j) {
    try {
        EvaluationReport r;
        r.model = j.at("model").get<std::string>();
        r.accuracy = j.at("accuracy").get<double>();
        for (const auto& p : j.at("per_class"))
            r.per_class[p.at("class").get<ClassCode>()] = {p.at("precision").get<double>(),
                                                           p.at("recall").get<double>(), p.at("f1").get<double>(),
                                                           p.at("support").get<std::size_t>()};
        auto avg = [](const nlohmann::json& a) {
            return AveragedScores{a.at("precision").get<double>(), a.at("recall").get<double>(),
                                  a.at("f1").get<double>()};
        };
        r.macro = avg(j.at("macro"));
        r.weighted = avg(j.at("weighted"));
        r.confusion.classes = j.at("confusion").at("classes").get<std::vector<ClassCode>>();
        r.confusion.counts = j.at("confusion").at("counts").get<std::vector<std::vector<std::size_t>>>();
        r.zero_division = j.value("zero_division", std::vector<ClassCode>{});
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed evaluation report: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Comparison table

struct ComparisonRow {
    std::string model;
    double accuracy = 0;
    double precision = 0;
    double recall = 0;
    double f1 = 0;

    bool operator==(const ComparisonRow&) const = default;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;

    bool operator==(const ComparisonTable&) const = default;
};

/// One row per report using support-weighted averages, best accuracy first,
/// ties by model name.
inline ComparisonTable compare(std::span<const EvaluationReport> reports) {
    ComparisonTable t;
    for (const auto& r : reports)
        t.rows.push_back({r.model, r.accuracy, r.weighted.precision, r.weighted.recall, r.weighted.f1});
    std::stable_sort(t.rows.begin(), t.rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
        if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
        return a.model < b.model;
    });
    return t;
}

inline nlohmann::json comparison_to_json(const ComparisonTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"model", r.model}, {"accuracy", r.accuracy}, {"precision", r.precision},
                        {"recall", r.recall}, {"f1", r.f1}});
    return {{"rows", rows}};
}

namespace detail {

/// Display width in code points (model names may carry UTF-8).
inline std::size_t display_width(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

inline std::string pad_right(const std::string& s, std::size_t width) {
    const auto w = display_width(s);
    return w >= width ? s : s + std::string(width - w, ' ');
}

inline std::string pad_left(const std::string& s, std::size_t width) {
    const auto w = display_width(s);
    return w >= width ? s : std::string(width - w, ' ') + s;
}

}  // namespace detail

/// Aligned plain text, accuracy to 12 decimals and the averaged metrics to
/// two, matching the precision the comparison is usually quoted at.
inline std::string render_comparison(const ComparisonTable& t) {
    std::size_t name_w = detail::display_width("ML Model");
    for (const auto& r : t.rows) name_w = std::max(name_w, detail::display_width(r.model));
    std::ostringstream o;
    o << detail::pad_right("ML Model", name_w) << "  " << detail::pad_left("Accuracy", 14) << "  "
      << detail::pad_left("Precision", 9) << "  " << detail::pad_left("Recall", 6) << "  "
      << detail::pad_left("F1-score", 8) << '\n';
    o << std::string(name_w + 2 + 14 + 2 + 9 + 2 + 6 + 2 + 8, '-') << '\n';
    for (const auto& r : t.rows)
        o << detail::pad_right(r.model, name_w) << "  " << detail::pad_left(text::format_fixed(r.accuracy, 12), 14)
          << "  " << detail::pad_left(text::format_fixed(r.precision, 2), 9) << "  "
          << detail::pad_left(text::format_fixed(r.recall, 2), 6) << "  "
          << detail::pad_left(text::format_fixed(r.f1, 2), 8) << '\n';
    return o.str();
}

inline std::string render_report(const EvaluationReport& r, const std::vector<std::string>& class_names = {}) {
    auto name = [&](ClassCode c) {
        const auto i = static_cast<std::size_t>(c);
        return c >= 0 && i < class_names.size() ? class_names[i] : std::to_string(c);
    };
    std::size_t w = 12;
    for (const auto& [c, s] : r.per_class) w = std::max(w, detail::display_width(name(c)));
    std::ostringstream o;
    o << (r.model.empty() ? std::string("model") : r.model) << "\n";
    o << detail::pad_right("", w) << "  precision  recall  f1-score  support\n";
    for (const auto& [c, s] : r.per_class)
        o << detail::pad_right(name(c), w) << "  " << detail::pad_left(text::format_fixed(s.precision, 2), 9) << "  "
          << detail::pad_left(text::format_fixed(s.recall, 2), 6) << "  "
          << detail::pad_left(text::format_fixed(s.f1, 2), 8) << "  " << detail::pad_left(std::to_string(s.support), 7)
          << '\n';
    const auto total = std::to_string(r.confusion.total());
    o << '\n'
      << detail::pad_right("accuracy", w) << "  " << detail::pad_left("", 9) << "  " << detail::pad_left("", 6)
      << "  " << detail::pad_left(text::format_fixed(r.accuracy, 2), 8) << "  " << detail::pad_left(total, 7) << '\n';
    for (const auto& [label, a] : {std::pair{"macro avg", r.macro}, std::pair{"weighted avg", r.weighted}})
        o << detail::pad_right(label, w) << "  " << detail::pad_left(text::format_fixed(a.precision, 2), 9) << "  "
          << detail::pad_left(text::format_fixed(a.recall, 2), 6) << "  "
          << detail::pad_left(text::format_fixed(a.f1, 2), 8) << "  " << detail::pad_left(total, 7) << '\n';
    return o.str();
}

}  // namespace flowguard
