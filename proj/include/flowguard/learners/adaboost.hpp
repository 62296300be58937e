#pragma once

// Discrete multiclass AdaBoost (SAMME) over weighted depth-1 trees.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "flowguard/learners/tree.hpp"

namespace flowguard {

struct BoostParams {
    std::size_t n_rounds = 50;
    double learning_rate = 1.0;

    bool operator==(const BoostParams&) const = default;
};

struct BoostRound {
    DecisionTreeModel stump;
    double alpha = 0;
    double error = 0;  // weighted training error when the round was fitted

    bool operator==(const BoostRound&) const = default;
};

struct AdaBoostModel {
    std::vector<ClassCode> classes;
    std::size_t n_features = 0;
    BoostParams params;
    std::vector<BoostRound> rounds;

    bool operator==(const AdaBoostModel&) const = default;
};

/// Round weight used for a perfect stump.
inline const double boost_alpha_cap = std::log(1e10);

/// SAMME round weight: rate * (ln((1 - e) / e) + ln(K - 1)).
inline double samme_alpha(double error, std::size_t n_classes, double learning_rate) {
    return learning_rate * (std::log((1.0 - error) / error) + std::log(static_cast<double>(n_classes) - 1.0));
}

/// Called with the sample weights before round 1 (round = 0) and after each
/// stored round's reweighting.
using BoostObserver = std::function<void(std::size_t round, std::span<const double> weights)>;

/// Starts from uniform weights. A round whose weighted error reaches
/// 1 - 1/K ends training and is discarded; a perfect round is stored with
/// alpha = ln(1e10) and ends training.
inline AdaBoostModel adaboost_fit(const FeatureMatrix& X, const LabelVector& y, BoostParams params = {},
                                  std::uint64_t seed = 0, const BoostObserver& observer = {}) {
    learners::require_training(X, y);
    AdaBoostModel model;
    model.classes = learners::observed_classes(y);
    model.n_features = X.cols();
    model.params = params;
    const std::size_t K = model.classes.size();
    if (K < 2) throw InvalidArgument("boosting needs at least two classes");

    const std::size_t n = X.rows;
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    if (observer) observer(0, w);
    const TreeParams stump_params{1, 2, 0};
    const double give_up = 1.0 - 1.0 / static_cast<double>(K);

    for (std::size_t round = 1; round <= params.n_rounds; ++round) {
        auto stump = tree_fit(X, y, stump_params, derive_seed(derive_seed(seed, streams::boost), round), w);
        std::vector<bool> miss(n);
        double error = 0;
        for (std::size_t i = 0; i < n; ++i) {
            miss[i] = stump.predict_row(X.row(i)) != y.values[i];
            if (miss[i]) error += w[i];
        }
        if (error >= give_up) break;
        if (error <= 0) {
            model.rounds.push_back({std::move(stump), boost_alpha_cap, 0.0});
            break;
        }
        const double alpha = samme_alpha(error, K, params.learning_rate);
        if (!(alpha > 0)) break;
        model.rounds.push_back({std::move(stump), alpha, error});

        const double boost = std::exp(alpha);
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (miss[i]) w[i] *= boost;
            total += w[i];
        }
        for (auto& wi : w) wi /= total;
        if (observer) observer(round, w);
    }
    return model;
}

/// argmax over classes of the summed alpha of stumps voting for the class.
inline std::vector<ClassCode> adaboost_predict(const AdaBoostModel& m, const FeatureMatrix& X) {
    if (m.rounds.empty()) throw NoRounds("boosted model has no stored rounds");
    learners::require_width(X, m.n_features);
    std::vector<ClassCode> out(X.rows);
    std::vector<double> score(m.classes.size());
    for (std::size_t i = 0; i < X.rows; ++i) {
        std::fill(score.begin(), score.end(), 0.0);
        const auto x = X.row(i);
        for (const auto& r : m.rounds) score[learners::class_index(m.classes, r.stump.predict_row(x))] += r.alpha;
        out[i] = m.classes[learners::argmax_low<double>(score)];
    }
    return out;
}

}  // namespace flowguard
