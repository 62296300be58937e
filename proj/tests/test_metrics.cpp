#include <gtest/gtest.h>

#include <sstream>

#include "flowguard/learners/model.hpp"
#include "flowguard/metrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace fg = flowguard;

namespace {

using Labels = std::vector<fg::ClassCode>;

}  // namespace

TEST(Confusion, RowsAreTruthColumnsArePredictions) {
    const auto cm = fg::confusion(Labels{0, 0, 1, 1}, Labels{0, 1, 1, 1}, {0, 1});
    EXPECT_EQ(cm.counts, (std::vector<std::vector<std::size_t>>{{1, 1}, {0, 2}}));
    EXPECT_EQ(cm.total(), 4u);
}

TEST(Confusion, LengthAndLabelChecks) {
    EXPECT_THROW(fg::confusion(Labels{0, 1}, Labels{0}, {0, 1}), fg::LengthMismatch);
    EXPECT_THROW(fg::confusion(Labels{0, 2}, Labels{0, 1}, {0, 1}), fg::UnknownLabel);
}

TEST(Scores, HandWorkedBinaryCase) {
    const auto r = fg::evaluate(Labels{0, 0, 1, 1}, Labels{0, 1, 1, 1}, {0, 1});
    EXPECT_DOUBLE_EQ(r.accuracy, 0.75);
    EXPECT_DOUBLE_EQ(r.per_class.at(1).precision, 2.0 / 3);
    EXPECT_DOUBLE_EQ(r.per_class.at(1).recall, 1.0);
    EXPECT_DOUBLE_EQ(r.per_class.at(1).f1, 0.8);
    EXPECT_DOUBLE_EQ(r.per_class.at(0).precision, 1.0);
    EXPECT_DOUBLE_EQ(r.per_class.at(0).recall, 0.5);
    EXPECT_EQ(r.per_class.at(0).support, 2u);
    EXPECT_TRUE(r.zero_division.empty());
}

TEST(Scores, PerfectDiagonal) {
    const auto r = fg::evaluate(Labels{0, 1, 2, 2}, Labels{0, 1, 2, 2}, {0, 1, 2});
    EXPECT_DOUBLE_EQ(r.accuracy, 1.0);
    for (const auto& [c, s] : r.per_class) {
        EXPECT_DOUBLE_EQ(s.precision, 1.0);
        EXPECT_DOUBLE_EQ(s.recall, 1.0);
        EXPECT_DOUBLE_EQ(s.f1, 1.0);
    }
    EXPECT_DOUBLE_EQ(r.macro.f1, 1.0);
}

TEST(Scores, NeverPredictedClassIsZeroAndFlagged) {
    const auto r = fg::evaluate(Labels{0, 0, 1}, Labels{0, 0, 0}, {0, 1});
    EXPECT_EQ(r.per_class.at(1).precision, 0.0);
    EXPECT_EQ(r.per_class.at(1).recall, 0.0);
    EXPECT_EQ(r.per_class.at(1).f1, 0.0);
    EXPECT_EQ(r.zero_division, (Labels{1}));
}

TEST(Scores, AbsentClassInListIsFlagged) {
    const auto r = fg::evaluate(Labels{0, 1}, Labels{0, 1}, {0, 1, 2});
    EXPECT_EQ(r.per_class.at(2).support, 0u);
    EXPECT_EQ(r.zero_division, (Labels{2}));
    EXPECT_NEAR(r.macro.recall, 2.0 / 3, 1e-15);
    EXPECT_DOUBLE_EQ(r.weighted.recall, 1.0);
}

TEST(Scores, EmptyMatrixCannotBeScored) {
    EXPECT_THROW(fg::evaluate(Labels{}, Labels{}, {0, 1}), fg::EmptyMatrix);
}

TEST(Scores, AgreeWithDirectCountingOnRandomLabels) {
    fg::testing::Gen gen(53);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = gen.size(1, 60);
        const int K = gen.integer(1, 5);
        const auto truth = gen.labels(n, K), pred = gen.labels(n, K);
        Labels classes(static_cast<std::size_t>(K));
        for (int c = 0; c < K; ++c) classes[static_cast<std::size_t>(c)] = c;
        const auto r = fg::evaluate(truth, pred, classes);
        const auto o = fg::testing::oracle_metrics(truth, pred, classes);
        ASSERT_NEAR(r.accuracy, o.accuracy, 1e-12);
        for (auto c : classes) {
            ASSERT_NEAR(r.per_class.at(c).precision, o.precision.at(c), 1e-12);
            ASSERT_NEAR(r.per_class.at(c).recall, o.recall.at(c), 1e-12);
            ASSERT_NEAR(r.per_class.at(c).f1, o.f1.at(c), 1e-12);
            ASSERT_EQ(r.per_class.at(c).support, o.support.at(c));
        }
        ASSERT_NEAR(r.macro.precision, o.macro_p, 1e-12);
        ASSERT_NEAR(r.macro.recall, o.macro_r, 1e-12);
        ASSERT_NEAR(r.macro.f1, o.macro_f, 1e-12);
        ASSERT_NEAR(r.weighted.precision, o.weighted_p, 1e-12);
        ASSERT_NEAR(r.weighted.f1, o.weighted_f, 1e-12);
        // Support-weighted recall is always the accuracy.
        ASSERT_NEAR(r.weighted.recall, r.accuracy, 1e-12);
        ASSERT_EQ(r.confusion.total(), n);
    }
}

TEST(Scores, JsonRoundTrip) {
    const auto r = fg::evaluate(Labels{0, 0, 1, 2}, Labels{0, 1, 1, 0}, {0, 1, 2}, "Naive Bayes");
    EXPECT_EQ(fg::report_from_json(fg::report_to_json(r)), r);
}

TEST(Comparison, SortedByAccuracyThenName) {
    std::vector<fg::EvaluationReport> reports(3);
    reports[0].model = "b";
    reports[0].accuracy = 0.5;
    reports[1].model = "c";
    reports[1].accuracy = 0.9;
    reports[2].model = "a";
    reports[2].accuracy = 0.5;
    const auto t = fg::compare(reports);
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows[0].model, "c");
    EXPECT_EQ(t.rows[1].model, "a");
    EXPECT_EQ(t.rows[2].model, "b");
}

TEST(Comparison, RendersTwelveDecimalAccuracyAndTwoDecimalAverages) {
    fg::ComparisonTable t;
    t.rows = {{"Na\u00efve Bayes Classifier", 0.930784538419, 0.92, 0.93, 0.92},
              {"AdaBoost Classifier", 0.954889348908, 0.91, 0.95, 0.93},
              {"Random Forest Classifier", 0.954889348908, 0.93, 0.95, 0.93},
              {"K-Nearest Neighbors Classifier", 0.688556607028, 0.90, 0.69, 0.78}};
    const auto text = fg::render_comparison(t);
    for (const char* s : {"0.930784538419", "0.954889348908", "0.688556607028", "0.92", "0.78", "Random Forest",
                          "ML Model", "Accuracy", "Precision", "Recall", "F1-score"})
        EXPECT_NE(text.find(s), std::string::npos) << s;
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n';
    EXPECT_EQ(lines, 6u);
    // Columns stay aligned even though one name holds a multi-byte character.
    std::vector<std::size_t> widths;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) widths.push_back(fg::detail::display_width(line));
    for (auto w : widths) EXPECT_EQ(w, widths.front());
}

TEST(Comparison, DisplayNames) {
    EXPECT_EQ(fg::display_name(fg::Algorithm::naive_bayes), "Na\u00efve Bayes Classifier");
    EXPECT_EQ(fg::display_name(fg::Algorithm::adaboost), "AdaBoost Classifier");
    EXPECT_EQ(fg::display_name(fg::Algorithm::random_forest), "Random Forest Classifier");
    EXPECT_EQ(fg::display_name(fg::Algorithm::knn), "K-Nearest Neighbors Classifier");
    const auto& order = fg::table_algorithms();
    EXPECT_EQ(order, (std::vector<fg::Algorithm>{fg::Algorithm::naive_bayes, fg::Algorithm::adaboost,
                                                 fg::Algorithm::random_forest, fg::Algorithm::knn}));
}

TEST(Report, ClassNamesAndAverages) {
    const auto r = fg::evaluate(Labels{0, 0, 1, 1}, Labels{0, 1, 1, 1}, {0, 1}, "KNN");
    const auto text = fg::render_report(r, {"normal", "attack"});
    for (const char* s : {"KNN", "normal", "attack", "macro avg", "weighted avg", "0.75", "0.67"})
        EXPECT_NE(text.find(s), std::string::npos) << s;
}
