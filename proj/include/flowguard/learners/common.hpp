#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "flowguard/errors.hpp"
#include "flowguard/flowdata.hpp"

namespace flowguard::learners {

inline void require_training(const FeatureMatrix& X, const LabelVector& y) {
    if (X.rows != y.size()) throw DimensionMismatch("feature rows and labels differ in length");
    if (X.rows == 0) throw EmptyTraining("no training rows");
}

inline void require_width(const FeatureMatrix& X, std::size_t expected) {
    if (X.cols() != expected)
        throw DimensionMismatch("model expects " + std::to_string(expected) + " features, got " +
                                std::to_string(X.cols()));
}

/// Index of the largest score; the earliest (lowest class code) wins ties.
template <typename T>
std::size_t argmax_low(std::span<const T> scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;
    return best;
}

/// Sorted distinct class codes present in y.
inline std::vector<ClassCode> observed_classes(const LabelVector& y) {
    std::vector<ClassCode> c = y.values;
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
}

/// Position of `code` in the sorted class list.
inline std::size_t class_index(std::span<const ClassCode> classes, ClassCode code) {
    auto it = std::lower_bound(classes.begin(), classes.end(), code);
    if (it == classes.end() || *it != code) throw UnknownLabel("class " + std::to_string(code) + " not in model");
    return static_cast<std::size_t>(it - classes.begin());
}

/// Runs body(i) for i in [0, n) over a few threads. Each index is handled
/// exactly once, so results written by index do not depend on scheduling.
template <typename F>
void parallel_for(std::size_t n, F&& body) {
    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const std::size_t workers = std::min(hw, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) body(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace flowguard::learners
