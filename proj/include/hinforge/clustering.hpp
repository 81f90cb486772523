#pragma once

#include "hinforge/rng.hpp"
#include "hinforge/tensor.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace hinforge {

struct KMeansResult {
    Tensor centers;
    std::vector<int> assignments;
    double inertia = 0.0;
    // One entry per Lloyd iteration of the winning restart; non-increasing.
    std::vector<double> inertia_history;
};

// k-means++ seeding, best of `restarts` runs by inertia (ties to the lower
// restart index). Empty clusters are reseeded to the farthest point.
KMeansResult kmeans(const Tensor& z, int k, int max_iters, int restarts, std::uint64_t seed);

// Row-softmax of negated euclidean distances to the centers, so nearer
// centers get higher probability.
Tensor distance_softmax_init(const Tensor& z, const Tensor& centers);

// Ties break toward the lowest index.
std::vector<int> argmax_assignments(const Tensor& q);

enum class NmiNorm { sqrt_mean, arithmetic_mean };

// Two constant labelings count as the same partition (1); one constant
// against a varying one scores 0.
double nmi(const std::vector<int>& a, const std::vector<int>& b,
           NmiNorm norm = NmiNorm::sqrt_mean);

struct ClassifierModel {
    // (d+1) x c; last row is the bias, excluded from the L2 penalty.
    Tensor w;
    int classes = 0;
};

// Multinomial logistic regression, full-batch L-BFGS with backtracking line
// search, run to gradient norm < 1e-6 or the iteration cap.
ClassifierModel train_classifier(const Tensor& z, const std::vector<int>& y, int classes,
                                 double l2);
std::vector<int> classify(const ClassifierModel& model, const Tensor& z);

// (micro, macro). Micro equals accuracy for single-label predictions; macro
// skips classes absent from both arguments.
std::pair<double, double> f1_scores(const std::vector<int>& pred, const std::vector<int>& truth);

// Per-class shuffle, floor(frac * count) but at least one row in train.
std::pair<std::vector<int>, std::vector<int>> stratified_split(const std::vector<int>& y,
                                                               double train_frac,
                                                               std::uint64_t seed);

}  // namespace hinforge
