#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "flowguard/learners/model.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace fg = flowguard;
using fg::testing::matrix;

namespace {

fg::LabelVector labels(std::vector<fg::ClassCode> v) { return fg::LabelVector::from_values(std::move(v)); }

double accuracy(const std::vector<fg::ClassCode>& a, const std::vector<fg::ClassCode>& b) {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < a.size(); ++i) hit += a[i] == b[i];
    return static_cast<double>(hit) / static_cast<double>(a.size());
}

const fg::FeatureMatrix xor_X = matrix({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
const fg::LabelVector xor_y = fg::LabelVector::from_values({0, 1, 1, 0});

/// Two well-separated Gaussian-ish blobs from sums of uniforms.
std::pair<fg::FeatureMatrix, fg::LabelVector> blobs(std::size_t per_class, std::uint64_t seed) {
    fg::testing::Gen gen(seed);
    fg::FeatureMatrix X({"a", "b"}, 0);
    std::vector<fg::ClassCode> y;
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < per_class; ++i) {
            auto noise = [&] { return gen.real(-1, 1) + gen.real(-1, 1) + gen.real(-1, 1); };
            const double centre = c == 0 ? -10.0 : 10.0;
            const std::vector<double> row{centre + noise(), centre + noise()};
            X.append_row(row);
            y.push_back(c);
        }
    return {X, labels(y)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Naive Bayes

TEST(NaiveBayes, SingleClassPredictsItWithCertainty) {
    const auto m = fg::nb_fit(matrix({{1}, {2}, {3}}), labels({4, 4, 4}));
    const auto p = fg::nb_predict(m, matrix({{-100}, {2}, {50}}));
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(p.labels[i], 4);
        EXPECT_DOUBLE_EQ(p.posteriors[i][0], 1.0);
    }
}

TEST(NaiveBayes, PriorsAreClassFrequencies) {
    const auto m = fg::nb_fit(matrix({{0}, {1}, {2}, {9}}), labels({0, 0, 0, 1}));
    EXPECT_DOUBLE_EQ(m.priors[0], 0.75);
    EXPECT_DOUBLE_EQ(m.priors[1], 0.25);
}

TEST(NaiveBayes, MeansZeroAndTenPredictNearerMean) {
    // Class 0 at {-1, 1}: mean 0, variance 1. Class 1 at {9, 11}: mean 10, variance 1.
    const auto m = fg::nb_fit(matrix({{-1}, {1}, {9}, {11}}), labels({0, 0, 1, 1}));
    EXPECT_DOUBLE_EQ(m.means[0][0], 0.0);
    EXPECT_DOUBLE_EQ(m.variances[1][0], 1.0);
    EXPECT_EQ(fg::nb_predict(m, matrix({{1}})).labels[0], 0);
}

TEST(NaiveBayes, MidpointIsAnEvenSplitResolvedToLowerCode) {
    const auto m = fg::nb_fit(matrix({{-1}, {1}, {9}, {11}}), labels({0, 0, 1, 1}));
    const auto p = fg::nb_predict(m, matrix({{5}}));
    EXPECT_NEAR(p.posteriors[0][0], 0.5, 1e-12);
    EXPECT_NEAR(p.posteriors[0][1], 0.5, 1e-12);
    EXPECT_EQ(p.labels[0], 0);
}

TEST(NaiveBayes, TinyVarianceAtClassMeanIsNearlyCertain) {
    const auto m = fg::nb_fit(matrix({{2.0}, {2.001}, {5.0}, {5.001}}), labels({0, 0, 1, 1}));
    EXPECT_GT(fg::nb_predict(m, matrix({{5.0005}})).posteriors[0][1], 0.999);
}

TEST(NaiveBayes, ConstantFeaturesUseAbsoluteFloor) {
    const auto m = fg::nb_fit(matrix({{3}, {3}, {3}}), labels({0, 1, 1}));
    EXPECT_DOUBLE_EQ(m.variance_floor, 1e-9);
    EXPECT_DOUBLE_EQ(m.variances[0][0], 1e-9);
}

TEST(NaiveBayes, PosteriorsMatchDensityFormula) {
    fg::testing::Gen gen(41);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = gen.size(4, 30);
        std::vector<double> x(n);
        std::vector<fg::ClassCode> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = i < 2 ? static_cast<fg::ClassCode>(i) : gen.integer(0, 1);
            x[i] = gen.real(-3, 3) + (y[i] ? 2.0 : 0.0);
        }
        fg::FeatureMatrix X({"x"}, 0);
        for (double v : x) X.append_row(std::vector<double>{v});
        const auto m = fg::nb_fit(X, labels(y));
        const double q = gen.real(-4, 6);
        const auto got = fg::nb_predict(m, matrix({{q}})).posteriors[0];
        const auto want = fg::testing::oracle_nb_posterior(x, y, {0, 1}, q);
        EXPECT_NEAR(got[0], want[0], 1e-9);
        EXPECT_NEAR(got[1], want[1], 1e-9);
    }
}

TEST(NaiveBayes, EmptyTrainingAndWidthChecks) {
    EXPECT_THROW(fg::nb_fit(fg::FeatureMatrix({"a"}, 0), labels({})), fg::EmptyTraining);
    const auto m = fg::nb_fit(matrix({{1}, {2}}), labels({0, 1}));
    EXPECT_THROW(fg::nb_predict(m, matrix({{1, 2}})), fg::DimensionMismatch);
}

// ---------------------------------------------------------------------------
// KNN

TEST(Knn, StoresRowsVerbatimAndClipsK) {
    const auto X = matrix({{1}, {1}, {2}, {3}});
    const auto m = fg::knn_fit(X, labels({0, 0, 1, 1}), 10);
    EXPECT_EQ(m.k, 4u);
    EXPECT_EQ(m.train.rows, 4u);
}

TEST(Knn, IdentityQueryWithKOne) {
    const auto m = fg::knn_fit(matrix({{0, 0}, {5, 5}, {9, 1}}), labels({2, 7, 3}), 1);
    EXPECT_EQ(fg::knn_predict(m, matrix({{5, 5}}))[0], 7);
}

TEST(Knn, MajorityOfThree) {
    const auto m = fg::knn_fit(matrix({{1}, {2}, {3}, {50}}), labels({1, 1, 0, 0}), 3);
    EXPECT_EQ(fg::knn_predict(m, matrix({{0}}))[0], 1);
}

TEST(Knn, TieGoesToNearestNeighbourClass) {
    const auto m = fg::knn_fit(matrix({{1}, {3}}), labels({1, 0}), 2);
    EXPECT_EQ(fg::knn_predict(m, matrix({{2.5}}))[0], 0);
    EXPECT_EQ(fg::knn_predict(m, matrix({{1.5}}))[0], 1);
}

TEST(Knn, MatchesNaiveAllPairsImplementation) {
    fg::testing::Gen gen(43);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = gen.size(1, 25), d = gen.size(1, 3);
        const auto X = gen.grid_matrix(n, d, 0, 4);
        const auto y = gen.labels(n, gen.integer(1, 3));
        const std::size_t k = gen.size(1, 7);
        const auto m = fg::knn_fit(X, labels(y), k);
        const auto Q = gen.grid_matrix(10, d, -1, 5);
        const auto pred = fg::knn_predict(m, Q);
        for (std::size_t i = 0; i < Q.rows; ++i) EXPECT_EQ(pred[i], fg::testing::oracle_knn(X, y, k, Q.row(i)));
    }
}

// ---------------------------------------------------------------------------
// Decision tree

TEST(Tree, PureInputIsASingleLeaf) {
    const auto t = fg::tree_fit(matrix({{1}, {2}, {3}}), labels({5, 5, 5}));
    ASSERT_EQ(t.nodes.size(), 1u);
    EXPECT_TRUE(t.root().is_leaf());
    EXPECT_EQ(t.root().label, 5);
}

TEST(Tree, XorIsLearnedExactly) {
    const auto t = fg::tree_fit(xor_X, xor_y, {2, 2, 0});
    EXPECT_EQ(fg::tree_predict(t, xor_X), xor_y.values);
    EXPECT_EQ(t.depth(), 2u);
}

TEST(Tree, PerfectSplitBeatsImpureOnes) {
    const auto X = matrix({{0, 3}, {1, 1}, {2, 4}, {3, 1}, {4, 5}, {5, 9}, {6, 2}, {7, 6}, {8, 5}, {9, 3}});
    const auto y = labels({0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
    std::vector<std::size_t> cls(y.values.begin(), y.values.end()), rows(10), feats{0, 1};
    std::iota(rows.begin(), rows.end(), 0);
    const std::vector<double> w(10, 1.0);
    const auto s = fg::best_split(X, cls, w, rows, feats, 2);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->feature, 0u);
    EXPECT_DOUBLE_EQ(s->threshold, 4.5);
    EXPECT_DOUBLE_EQ(s->impurity, 0.0);
}

TEST(Tree, ThresholdValueGoesLeft) {
    const auto t = fg::tree_fit(matrix({{1}, {3}}), labels({0, 1}));
    ASSERT_FALSE(t.root().is_leaf());
    EXPECT_EQ(t.predict_row(std::vector<double>{t.root().threshold}), 0);
    EXPECT_EQ(t.predict_row(std::vector<double>{std::nextafter(t.root().threshold, 10.0)}), 1);
}

TEST(Tree, SplitChoiceMatchesExhaustiveEnumeration) {
    fg::testing::Gen gen(47);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = gen.size(2, 20), d = gen.size(1, 4);
        const std::size_t K = gen.size(2, 3);
        const auto X = gen.grid_matrix(n, d, 0, 5);
        std::vector<std::size_t> cls(n);
        for (auto& c : cls) c = gen.size(0, K - 1);
        std::vector<std::size_t> rows(n), feats(d);
        std::iota(rows.begin(), rows.end(), 0);
        std::iota(feats.begin(), feats.end(), 0);
        const std::vector<double> w(n, 1.0);
        const auto got = fg::best_split(X, cls, w, rows, feats, K);
        const auto want = fg::testing::oracle_best_split(X, cls, K);
        ASSERT_EQ(got.has_value(), want.has_value());
        if (!got) continue;
        EXPECT_EQ(got->feature, want->feature);
        std::set<std::size_t> left;
        for (std::size_t i = 0; i < n; ++i)
            if (X.at(i, got->feature) <= got->threshold) left.insert(i);
        EXPECT_EQ(left, want->left_rows);
        EXPECT_NEAR(got->impurity, want->impurity, 1e-12);
    }
}

TEST(Tree, MaxDepthAndMinSamplesAreRespected) {
    const auto [X, y] = blobs(30, 5);
    EXPECT_LE(fg::tree_fit(X, y, {1, 2, 0}).depth(), 1u);
    const auto t = fg::tree_fit(X, y, {0, 1000, 0});
    EXPECT_EQ(t.nodes.size(), 1u);
}

// ---------------------------------------------------------------------------
// Forest

TEST(Forest, SingleTreeWithoutBootstrapEqualsPlainTree) {
    const auto [X, y] = blobs(25, 9);
    fg::ForestParams p;
    p.n_trees = 1;
    p.bootstrap = false;
    p.features_per_split = X.cols();
    const auto f = fg::forest_fit(X, y, p, 3);
    const auto t = fg::tree_fit(X, y, {0, 2, X.cols()}, 3);
    EXPECT_EQ(fg::forest_predict(f, X), fg::tree_predict(t, X));
    const auto Q = fg::testing::Gen(1).real_matrix(50, 2, -15, 15);
    EXPECT_EQ(fg::forest_predict(f, Q), fg::tree_predict(t, Q));
}

TEST(Forest, BlobsAreFitPerfectly) {
    const auto [X, y] = blobs(100, 13);
    ASSERT_EQ(accuracy(fg::tree_predict(fg::tree_fit(X, y), X), y.values), 1.0);
    const auto f = fg::forest_fit(X, y, {}, 7);
    EXPECT_EQ(f.trees.size(), 100u);
    EXPECT_EQ(accuracy(fg::forest_predict(f, X), y.values), 1.0);
}

TEST(Forest, VotesAndTies) {
    auto leaf = [](fg::ClassCode c) {
        fg::DecisionTreeModel t{{0, 1}, 1, {fg::TreeNode{}}};
        t.nodes[0].label = c;
        return t;
    };
    fg::RandomForestModel m{{0, 1}, 1, {}, 0, {leaf(1), leaf(1), leaf(0)}};
    EXPECT_EQ(fg::forest_predict(m, matrix({{0}}))[0], 1);
    m.trees = {leaf(1), leaf(0)};
    EXPECT_EQ(fg::forest_predict(m, matrix({{0}}))[0], 0);
    m.trees = {leaf(1), leaf(1)};
    EXPECT_EQ(fg::forest_predict(m, matrix({{0}}))[0], 1);
}

TEST(Forest, SameSeedSameModel) {
    const auto [X, y] = blobs(20, 2);
    fg::ForestParams p;
    p.n_trees = 10;
    EXPECT_EQ(fg::forest_fit(X, y, p, 5), fg::forest_fit(X, y, p, 5));
}

// ---------------------------------------------------------------------------
// AdaBoost

TEST(AdaBoost, AlphaFormula) {
    EXPECT_NEAR(fg::samme_alpha(0.25, 2, 1.0), std::log(3.0), 1e-12);
    EXPECT_NEAR(fg::samme_alpha(0.25, 2, 1.0), 1.0986, 1e-4);
}

TEST(AdaBoost, FirstRoundAlphaOnHandWeightedFixtures) {
    {
        // One point of four is misclassified by the best stump: e = 1/4.
        std::vector<std::vector<double>> seen;
        const auto m = fg::adaboost_fit(matrix({{0}, {1}, {2}, {3}}), labels({0, 0, 1, 0}), {1, 1.0}, 0,
                                        [&](std::size_t, std::span<const double> w) { seen.emplace_back(w.begin(), w.end()); });
        ASSERT_EQ(m.rounds.size(), 1u);
        EXPECT_NEAR(m.rounds[0].error, 0.25, 1e-12);
        EXPECT_NEAR(m.rounds[0].alpha, std::log((1 - 0.25) / 0.25) + std::log(1.0), 1e-12);
        ASSERT_EQ(seen.size(), 2u);
        EXPECT_EQ(seen[0], std::vector<double>(4, 0.25));
        const std::vector<double> after{1.0 / 6, 1.0 / 6, 0.5, 1.0 / 6};
        for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(seen[1][i], after[i], 1e-12);
    }
    {
        // Three classes in pairs: a stump isolates one pair, e = 1/3.
        const auto m = fg::adaboost_fit(matrix({{0}, {1}, {2}, {3}, {4}, {5}}), labels({0, 0, 1, 1, 2, 2}), {1, 1.0});
        ASSERT_EQ(m.rounds.size(), 1u);
        const double e = 1.0 / 3;
        EXPECT_NEAR(m.rounds[0].error, e, 1e-12);
        EXPECT_NEAR(m.rounds[0].alpha, std::log((1 - e) / e) + std::log(2.0), 1e-12);
    }
}

TEST(AdaBoost, SeparableDataStopsAfterOnePerfectRound) {
    const auto m = fg::adaboost_fit(matrix({{1}, {2}, {3}, {10}, {11}}), labels({0, 0, 0, 1, 1}));
    ASSERT_EQ(m.rounds.size(), 1u);
    EXPECT_DOUBLE_EQ(m.rounds[0].alpha, fg::boost_alpha_cap);
    EXPECT_EQ(fg::adaboost_predict(m, matrix({{0}, {12}})), (std::vector<fg::ClassCode>{0, 1}));
}

TEST(AdaBoost, WeightedVote) {
    auto stump = [](fg::ClassCode c) {
        fg::DecisionTreeModel t{{0, 1}, 1, {fg::TreeNode{}}};
        t.nodes[0].label = c;
        return t;
    };
    fg::AdaBoostModel m{{0, 1}, 1, {}, {{stump(1), 1.0, 0.1}}};
    EXPECT_EQ(fg::adaboost_predict(m, matrix({{0}}))[0], 1);
    m.rounds = {{stump(0), 0.5, 0.2}, {stump(1), 1.0, 0.1}};
    EXPECT_EQ(fg::adaboost_predict(m, matrix({{0}}))[0], 1);
    m.rounds = {{stump(1), 0.7, 0.2}, {stump(0), 0.7, 0.2}};
    EXPECT_EQ(fg::adaboost_predict(m, matrix({{0}}))[0], 0);
}

TEST(AdaBoost, NeedsTwoClassesAndRounds) {
    EXPECT_THROW(fg::adaboost_fit(matrix({{1}, {2}}), labels({1, 1})), fg::InvalidArgument);
    fg::AdaBoostModel empty{{0, 1}, 1, {}, {}};
    EXPECT_THROW(fg::adaboost_predict(empty, matrix({{0}})), fg::NoRounds);
}

TEST(AdaBoost, XorNeedsMoreThanStumpsButStaysDeterministic) {
    const auto a = fg::adaboost_fit(xor_X, xor_y, {}, 4), b = fg::adaboost_fit(xor_X, xor_y, {}, 4);
    EXPECT_EQ(a, b);
}

// ---------------------------------------------------------------------------
// Persistence

class Persistence : public ::testing::TestWithParam<fg::Algorithm> {};

TEST_P(Persistence, RoundTripGivesIdenticalPredictions) {
    const auto [X, y] = blobs(30, 21);
    fg::Hyperparameters h;
    h.forest.n_trees = 15;
    h.boost.n_rounds = 10;
    auto m = fg::fit_model(GetParam(), X, y, h, 7);
    m.scaler = fg::Standardizer{{0.5, -0.25}, {1.0, 2.0}};
    m.class_names = {"normal", "attack"};
    const auto back = fg::deserialize_model(fg::serialize_model(m));
    EXPECT_EQ(back, m);
    const auto probe = fg::testing::Gen(99).real_matrix(200, 2, -20, 20);
    EXPECT_EQ(fg::predict(back, probe), fg::predict(m, probe));
}

INSTANTIATE_TEST_SUITE_P(AllFamilies, Persistence,
                         ::testing::Values(fg::Algorithm::naive_bayes, fg::Algorithm::knn,
                                           fg::Algorithm::decision_tree, fg::Algorithm::random_forest,
                                           fg::Algorithm::adaboost),
                         [](const auto& info) { return fg::short_name(info.param); });

TEST(PersistenceErrors, TruncatedAndFutureVersionedFiles) {
    const auto [X, y] = blobs(10, 1);
    const auto text = fg::serialize_model(fg::fit_model(fg::Algorithm::naive_bayes, X, y));
    EXPECT_THROW(fg::deserialize_model(text.substr(0, text.size() / 2)), fg::CorruptModel);
    EXPECT_THROW(fg::deserialize_model(""), fg::CorruptModel);
    auto j = nlohmann::json::parse(text);
    j["version"] = fg::model_format_version + 1;
    EXPECT_THROW(fg::deserialize_model(j.dump()), fg::VersionMismatch);
    j["version"] = fg::model_format_version;
    j["params"] = "nonsense";
    EXPECT_THROW(fg::deserialize_model(j.dump()), fg::CorruptModel);
}
