#pragma once

// CART classification tree grown on weighted Gini impurity.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "flowguard/learners/common.hpp"
#include "flowguard/random.hpp"

namespace flowguard {

struct TreeParams {
    std::size_t max_depth = 0;  // 0 = unlimited
    std::size_t min_samples_split = 2;
    std::size_t features_per_split = 0;  // 0 or >= d = every feature, in column order

    bool operator==(const TreeParams&) const = default;
};

/// A node is a leaf when feature < 0. Rows with x[feature] <= threshold go
/// left. `counts` holds the (weighted) class totals that reached the node.
struct TreeNode {
    int feature = -1;
    double threshold = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    ClassCode label = 0;
    std::vector<double> counts;
    std::size_t samples = 0;

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct DecisionTreeModel {
    std::vector<ClassCode> classes;
    std::size_t n_features = 0;
    std::vector<TreeNode> nodes;  // root at 0

    const TreeNode& root() const { return nodes.front(); }

    std::size_t depth() const {
        std::size_t best = 0;
        std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
        while (!stack.empty()) {
            auto [n, d] = stack.back();
            stack.pop_back();
            best = std::max(best, d);
            if (!nodes[static_cast<std::size_t>(n)].is_leaf()) {
                stack.emplace_back(nodes[static_cast<std::size_t>(n)].left, d + 1);
                stack.emplace_back(nodes[static_cast<std::size_t>(n)].right, d + 1);
            }
        }
        return best;
    }

    std::size_t leaf_for(std::span<const double> x) const {
        std::size_t n = 0;
        while (!nodes[n].is_leaf())
            n = static_cast<std::size_t>(x[static_cast<std::size_t>(nodes[n].feature)] <= nodes[n].threshold
                                             ? nodes[n].left
                                             : nodes[n].right);
        return n;
    }

    ClassCode predict_row(std::span<const double> x) const { return nodes[leaf_for(x)].label; }

    bool operator==(const DecisionTreeModel&) const = default;
};

/// 1 - sum p_c^2 for the given class weights.
inline double gini(std::span<const double> counts) {
    double total = 0, sq = 0;
    for (double c : counts) total += c;
    if (total <= 0) return 0;
    for (double c : counts) sq += (c / total) * (c / total);
    return 1.0 - sq;
}

/// Child impurities weighted by their share of the parent's weight.
inline double weighted_gini(std::span<const double> left, std::span<const double> right) {
    double wl = 0, wr = 0;
    for (double c : left) wl += c;
    for (double c : right) wr += c;
    const double w = wl + wr;
    if (w <= 0) return 0;
    return (wl * gini(left) + wr * gini(right)) / w;
}

inline constexpr double split_tolerance = 1e-12;

struct SplitChoice {
    std::size_t feature = 0;
    double threshold = 0;
    double impurity = 0;
};

/// Best threshold split of `rows` over `features`, visited in the order
/// given. Candidate thresholds are midpoints between consecutive distinct
/// values; the first candidate with the lowest weighted Gini wins. A later
/// candidate must improve by more than split_tolerance, so rounding noise
/// between mathematically equal impurities never reorders ties.
/// `class_of[r]` is the class index of row r, `weights[r]` its weight.
inline std::optional<SplitChoice> best_split(const FeatureMatrix& X, std::span<const std::size_t> class_of,
                                             std::span<const double> weights, std::span<const std::size_t> rows,
                                             std::span<const std::size_t> features, std::size_t n_classes) {
    std::optional<SplitChoice> best;
    std::vector<double> total(n_classes, 0.0), left(n_classes), right(n_classes);
    for (auto r : rows) total[class_of[r]] += weights[r];

    std::vector<std::pair<double, std::size_t>> order(rows.size());
    for (auto f : features) {
        for (std::size_t i = 0; i < rows.size(); ++i) order[i] = {X.at(rows[i], f), rows[i]};
        std::sort(order.begin(), order.end());
        std::fill(left.begin(), left.end(), 0.0);
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            left[class_of[order[i].second]] += weights[order[i].second];
            const double v = order[i].first, next = order[i + 1].first;
            if (v == next) continue;
            for (std::size_t c = 0; c < n_classes; ++c) right[c] = total[c] - left[c];
            const double g = weighted_gini(left, right);
            if (!best || g < best->impurity - split_tolerance) {
                double mid = v + (next - v) / 2;
                if (mid >= next) mid = v;
                best = SplitChoice{f, mid, g};
            }
        }
    }
    return best;
}

namespace detail {

class TreeBuilder {
public:
    TreeBuilder(const FeatureMatrix& X, std::vector<std::size_t> class_of, std::span<const double> weights,
                std::size_t n_classes, const TreeParams& params, std::uint64_t seed)
        : X_(X), class_of_(std::move(class_of)), weights_(weights), K_(n_classes), params_(params),
          rng_(derive_seed(seed, streams::tree)) {}

    std::vector<TreeNode> grow(std::vector<std::size_t> rows, std::span<const ClassCode> classes) {
        struct Task {
            std::size_t node;
            std::vector<std::size_t> rows;
            std::size_t depth;
        };
        std::vector<TreeNode> nodes(1);
        std::vector<Task> stack;
        stack.push_back({0, std::move(rows), 0});
        const std::size_t d = X_.cols();
        const bool subsample = params_.features_per_split > 0 && params_.features_per_split < d;

        while (!stack.empty()) {
            Task task = std::move(stack.back());
            stack.pop_back();
            TreeNode node;
            node.counts.assign(K_, 0.0);
            std::vector<std::size_t> present(K_, 0);
            for (auto r : task.rows) {
                node.counts[class_of_[r]] += weights_[r];
                ++present[class_of_[r]];
            }
            node.samples = task.rows.size();
            node.label = classes[learners::argmax_low<double>(node.counts)];

            const bool pure = std::count_if(present.begin(), present.end(), [](auto c) { return c > 0; }) <= 1;
            const bool too_small = task.rows.size() < std::max<std::size_t>(params_.min_samples_split, 2);
            const bool too_deep = params_.max_depth > 0 && task.depth >= params_.max_depth;
            std::optional<SplitChoice> split;
            if (!pure && !too_small && !too_deep) split = choose(task.rows, d, subsample);

            if (!split) {
                nodes[task.node] = std::move(node);
                continue;
            }
            std::vector<std::size_t> left_rows, right_rows;
            for (auto r : task.rows)
                (X_.at(r, split->feature) <= split->threshold ? left_rows : right_rows).push_back(r);
            node.feature = static_cast<int>(split->feature);
            node.threshold = split->threshold;
            node.left = static_cast<std::int32_t>(nodes.size());
            node.right = node.left + 1;
            const auto left_idx = static_cast<std::size_t>(node.left);
            nodes[task.node] = std::move(node);
            nodes.emplace_back();
            nodes.emplace_back();
            stack.push_back({left_idx + 1, std::move(right_rows), task.depth + 1});
            stack.push_back({left_idx, std::move(left_rows), task.depth + 1});
        }
        return nodes;
    }

private:
    std::optional<SplitChoice> choose(std::span<const std::size_t> rows, std::size_t d, bool subsample) {
        std::vector<std::size_t> features(d);
        std::iota(features.begin(), features.end(), 0);
        if (!subsample) return best_split(X_, class_of_, weights_, rows, features, K_);
        rng_.shuffle(std::span(features));
        const auto m = params_.features_per_split;
        auto split = best_split(X_, class_of_, weights_, rows, std::span(features).first(m), K_);
        // Keep drawing past the quota while every drawn feature is constant here.
        for (std::size_t f = m; !split && f < d; ++f)
            split = best_split(X_, class_of_, weights_, rows, std::span(features).subspan(f, 1), K_);
        return split;
    }

    const FeatureMatrix& X_;
    std::vector<std::size_t> class_of_;
    std::span<const double> weights_;
    std::size_t K_;
    TreeParams params_;
    Rng rng_;
};

}  // namespace detail

/// Grows a tree on `rows` of X (all rows when empty; repeats allowed, as in
/// a bootstrap sample) with optional per-row weights (default 1). Classes
/// are those observed anywhere in y so trees of one forest share a layout.
inline DecisionTreeModel tree_fit(const FeatureMatrix& X, const LabelVector& y, const TreeParams& params = {},
                                  std::uint64_t seed = 0, std::span<const double> weights = {},
                                  std::span<const std::size_t> rows = {}) {
    learners::require_training(X, y);
    if (!weights.empty() && weights.size() != X.rows) throw DimensionMismatch("weights differ from row count");
    DecisionTreeModel model;
    model.classes = learners::observed_classes(y);
    model.n_features = X.cols();

    std::vector<std::size_t> class_of(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) class_of[i] = learners::class_index(model.classes, y.values[i]);
    std::vector<double> unit;
    if (weights.empty()) {
        unit.assign(X.rows, 1.0);
        weights = unit;
    }
    std::vector<std::size_t> all;
    if (rows.empty()) {
        all.resize(X.rows);
        std::iota(all.begin(), all.end(), 0);
    } else {
        all.assign(rows.begin(), rows.end());
    }
    detail::TreeBuilder builder(X, std::move(class_of), weights, model.classes.size(), params, seed);
    model.nodes = builder.grow(std::move(all), model.classes);
    return model;
}

inline std::vector<ClassCode> tree_predict(const DecisionTreeModel& tree, const FeatureMatrix& X) {
    learners::require_width(X, tree.n_features);
    std::vector<ClassCode> out(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) out[i] = tree.predict_row(X.row(i));
    return out;
}

}  // namespace flowguard
