#pragma once

// Random forest: bootstrap-sampled CART trees with per-split feature
// subsampling, combined by majority vote.

#include <cmath>
#include <cstdint>
#include <vector>

#include "flowguard/learners/tree.hpp"

namespace flowguard {

struct ForestParams {
    std::size_t n_trees = 100;
    bool bootstrap = true;
    std::size_t features_per_split = 0;  // 0 = ceil(sqrt(d))
    std::size_t max_depth = 0;
    std::size_t min_samples_split = 2;

    bool operator==(const ForestParams&) const = default;
};

struct RandomForestModel {
    std::vector<ClassCode> classes;
    std::size_t n_features = 0;
    ForestParams params;  // features_per_split resolved
    std::uint64_t seed = 0;
    std::vector<DecisionTreeModel> trees;

    bool operator==(const RandomForestModel&) const = default;
};

struct ForestPrediction {
    std::vector<ClassCode> labels;
    /// (top votes - runner-up votes) / n_trees per row.
    std::vector<double> margins;
};

inline std::size_t default_features_per_split(std::size_t d) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d)))));
}

/// Tree t draws its bootstrap sample from derive_seed(forest stream, t) and
/// its feature subsets from that seed's tree stream, so the result does not
/// depend on how trees are scheduled.
inline RandomForestModel forest_fit(const FeatureMatrix& X, const LabelVector& y, ForestParams params = {},
                                    std::uint64_t seed = 0) {
    learners::require_training(X, y);
    if (params.n_trees == 0) throw InvalidArgument("a forest needs at least one tree");
    if (params.features_per_split == 0) params.features_per_split = default_features_per_split(X.cols());

    RandomForestModel model;
    model.classes = learners::observed_classes(y);
    model.n_features = X.cols();
    model.params = params;
    model.seed = seed;
    model.trees.resize(params.n_trees);

    const TreeParams tp{params.max_depth, params.min_samples_split, params.features_per_split};
    const std::uint64_t forest_seed = derive_seed(seed, streams::forest);
    learners::parallel_for(params.n_trees, [&](std::size_t t) {
        const std::uint64_t tree_seed = derive_seed(forest_seed, t);
        std::vector<std::size_t> rows;
        if (params.bootstrap) {
            Rng rng(tree_seed);
            rows.resize(X.rows);
            for (auto& r : rows) r = static_cast<std::size_t>(rng.below(X.rows));
        }
        model.trees[t] = tree_fit(X, y, tp, tree_seed, {}, rows);
    });
    return model;
}

inline ForestPrediction forest_predict_detailed(const RandomForestModel& m, const FeatureMatrix& X) {
    learners::require_width(X, m.n_features);
    ForestPrediction out{std::vector<ClassCode>(X.rows), std::vector<double>(X.rows)};
    std::vector<std::size_t> votes(m.classes.size());
    for (std::size_t i = 0; i < X.rows; ++i) {
        std::fill(votes.begin(), votes.end(), 0);
        const auto x = X.row(i);
        for (const auto& tree : m.trees) ++votes[learners::class_index(m.classes, tree.predict_row(x))];
        const auto best = learners::argmax_low<std::size_t>(votes);
        std::size_t runner_up = 0;
        for (std::size_t c = 0; c < votes.size(); ++c)
            if (c != best) runner_up = std::max(runner_up, votes[c]);
        out.labels[i] = m.classes[best];
        out.margins[i] = static_cast<double>(votes[best] - runner_up) / static_cast<double>(m.trees.size());
    }
    return out;
}

inline std::vector<ClassCode> forest_predict(const RandomForestModel& m, const FeatureMatrix& X) {
    return forest_predict_detailed(m, X).labels;
}

}  // namespace flowguard
