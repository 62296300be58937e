#pragma once

// Gaussian Naive Bayes with a variance floor.

#include <cmath>
#include <numbers>
#include <vector>

#include "flowguard/learners/common.hpp"

namespace flowguard {

struct NaiveBayesModel {
    std::vector<ClassCode> classes;
    std::vector<double> priors;                  // per class
    std::vector<std::vector<double>> means;      // [class][feature]
    std::vector<std::vector<double>> variances;  // [class][feature], floored
    double variance_floor = 0;

    std::size_t n_features() const { return means.empty() ? 0 : means.front().size(); }
    bool operator==(const NaiveBayesModel&) const = default;
};

struct NaiveBayesPrediction {
    std::vector<ClassCode> labels;
    std::vector<std::vector<double>> posteriors;  // [row][class]
};

inline constexpr double nb_smoothing = 1e-9;

/// Priors are class frequencies; means and population variances are per
/// class and feature. Variances are floored at 1e-9 times the largest
/// whole-data feature variance (1e-9 outright when every feature is constant).
inline NaiveBayesModel nb_fit(const FeatureMatrix& X, const LabelVector& y) {
    learners::require_training(X, y);
    const std::size_t n = X.rows, d = X.cols();
    NaiveBayesModel m;
    m.classes = learners::observed_classes(y);
    const std::size_t K = m.classes.size();

    double max_var = 0;
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0;
        for (std::size_t i = 0; i < n; ++i) mean += X.at(i, j);
        mean /= static_cast<double>(n);
        double v = 0;
        for (std::size_t i = 0; i < n; ++i) v += (X.at(i, j) - mean) * (X.at(i, j) - mean);
        max_var = std::max(max_var, v / static_cast<double>(n));
    }
    m.variance_floor = nb_smoothing * (max_var > 0 ? max_var : 1.0);

    std::vector<std::size_t> count(K, 0);
    m.means.assign(K, std::vector<double>(d, 0.0));
    m.variances.assign(K, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = learners::class_index(m.classes, y.values[i]);
        ++count[c];
        for (std::size_t j = 0; j < d; ++j) m.means[c][j] += X.at(i, j);
    }
    for (std::size_t c = 0; c < K; ++c)
        for (std::size_t j = 0; j < d; ++j) m.means[c][j] /= static_cast<double>(count[c]);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = learners::class_index(m.classes, y.values[i]);
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = X.at(i, j) - m.means[c][j];
            m.variances[c][j] += dev * dev;
        }
    }
    m.priors.resize(K);
    for (std::size_t c = 0; c < K; ++c) {
        m.priors[c] = static_cast<double>(count[c]) / static_cast<double>(n);
        for (std::size_t j = 0; j < d; ++j)
            m.variances[c][j] = std::max(m.variances[c][j] / static_cast<double>(count[c]), m.variance_floor);
    }
    return m;
}

/// Posteriors are computed in log space and normalised with log-sum-exp.
inline NaiveBayesPrediction nb_predict(const NaiveBayesModel& m, const FeatureMatrix& X) {
    learners::require_width(X, m.n_features());
    const std::size_t K = m.classes.size(), d = m.n_features();
    NaiveBayesPrediction out;
    out.labels.resize(X.rows);
    out.posteriors.assign(X.rows, std::vector<double>(K, 0.0));

    std::vector<double> log_norm(K, 0.0);
    for (std::size_t c = 0; c < K; ++c) {
        log_norm[c] = std::log(m.priors[c]);
        for (std::size_t j = 0; j < d; ++j) log_norm[c] -= 0.5 * std::log(2.0 * std::numbers::pi * m.variances[c][j]);
    }
    std::vector<double> joint(K);
    for (std::size_t i = 0; i < X.rows; ++i) {
        const auto x = X.row(i);
        for (std::size_t c = 0; c < K; ++c) {
            double s = log_norm[c];
            for (std::size_t j = 0; j < d; ++j) {
                const double dev = x[j] - m.means[c][j];
                s -= 0.5 * dev * dev / m.variances[c][j];
            }
            joint[c] = s;
        }
        const auto best = learners::argmax_low<double>(joint);
        double total = 0;
        for (std::size_t c = 0; c < K; ++c) total += std::exp(joint[c] - joint[best]);
        for (std::size_t c = 0; c < K; ++c) out.posteriors[i][c] = std::exp(joint[c] - joint[best]) / total;
        out.labels[i] = m.classes[best];
    }
    return out;
}

}  // namespace flowguard
