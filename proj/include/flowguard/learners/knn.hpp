#pragma once

// Brute-force k-nearest-neighbour classifier.

#include <algorithm>
#include <queue>
#include <utility>
#include <vector>

#include "flowguard/learners/common.hpp"

namespace flowguard {

inline constexpr std::size_t default_knn_k = 5;

struct KnnModel {
    std::vector<ClassCode> classes;
    FeatureMatrix train;
    std::vector<ClassCode> labels;
    std::size_t k = default_knn_k;  // already clipped to the row count

    bool operator==(const KnnModel&) const = default;
};

/// Stores the training rows verbatim (duplicates included); k is clipped to n.
inline KnnModel knn_fit(const FeatureMatrix& X, const LabelVector& y, std::size_t k = default_knn_k) {
    learners::require_training(X, y);
    if (k == 0) throw InvalidArgument("k must be at least 1");
    return {learners::observed_classes(y), X, y.values, std::min(k, X.rows)};
}

/// The model's k nearest training rows to `query`, nearest first. Distance
/// ties resolve toward the lower training-row index.
inline std::vector<std::pair<double, std::size_t>> knn_neighbors(const KnnModel& m, std::span<const double> query) {
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry> heap;  // max-heap on (distance, index)
    for (std::size_t r = 0; r < m.train.rows; ++r) {
        const auto row = m.train.row(r);
        double s = 0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            const double d = query[j] - row[j];
            s += d * d;
        }
        if (heap.size() < m.k) {
            heap.emplace(s, r);
        } else if (Entry{s, r} < heap.top()) {
            heap.pop();
            heap.emplace(s, r);
        }
    }
    std::vector<Entry> out(heap.size());
    for (auto i = out.size(); i-- > 0;) {
        out[i] = heap.top();
        heap.pop();
    }
    return out;
}

/// Majority vote among the k nearest rows (Euclidean). A vote tie goes to the
/// tied class that owns the nearest of the neighbours.
inline std::vector<ClassCode> knn_predict(const KnnModel& m, const FeatureMatrix& X) {
    learners::require_width(X, m.train.cols());
    std::vector<ClassCode> out(X.rows);
    learners::parallel_for(X.rows, [&](std::size_t i) {
        const auto nn = knn_neighbors(m, X.row(i));
        std::vector<std::size_t> votes(m.classes.size(), 0);
        for (const auto& [dist, r] : nn) ++votes[learners::class_index(m.classes, m.labels[r])];
        const auto top = *std::max_element(votes.begin(), votes.end());
        for (const auto& [dist, r] : nn) {
            if (votes[learners::class_index(m.classes, m.labels[r])] == top) {
                out[i] = m.labels[r];
                break;
            }
        }
    });
    return out;
}

}  // namespace flowguard
