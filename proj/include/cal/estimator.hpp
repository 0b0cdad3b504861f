#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "cal/oracle.hpp"

namespace cal {

// Gaussian similarity kernel over the k nearest labeled neighbors.
// Bandwidth is in standardized-feature distance units.
struct SimilarityKernel {
  int k = 40;
  double bandwidth = 1.0;
};

// Median of all pairwise Euclidean distances; the `auto` bandwidth choice.
double median_pairwise_distance(const Eigen::MatrixXd& points);

// Nearest neighbors of x in the labeled feature matrix with normalized
// Gaussian weights exp(-d^2 / 2h^2). Returns (row index in L, weight), sum 1.
// If every raw weight underflows, weights fall back to uniform.
std::vector<std::pair<int, double>> neighbor_weights(
    const Eigen::VectorXd& x, const Eigen::MatrixXd& labeled_features,
    const SimilarityKernel& kernel);

// Similarity-weighted labeling correctness of one labeler around x:
// sum_k s(x_k, x) * I[y_k == response_ik]. truth_on_initial is the
// ground-truth label per ResponseMatrix column.
double estimate_accuracy(int labeler_index, const Eigen::VectorXd& x,
                         const ResponseMatrix& responses,
                         const std::vector<int>& truth_on_initial,
                         const Eigen::MatrixXd& initial_features,
                         const SimilarityKernel& kernel);

// All (labeler, pool instance) estimates in one pass; the ground-truth side
// never changes during a run so this is computed once and cached.
Eigen::MatrixXd estimate_all(const ResponseMatrix& responses,
                             const std::vector<int>& truth_on_initial,
                             const Eigen::MatrixXd& initial_features,
                             const Eigen::MatrixXd& pool_features,
                             const SimilarityKernel& kernel);

}  // namespace cal
