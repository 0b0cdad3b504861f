#include "cal/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cal {

double median_pairwise_distance(const Eigen::MatrixXd& points) {
  const int n = static_cast<int>(points.rows());
  if (n < 2) throw std::invalid_argument("median_pairwise_distance: need >= 2 points");
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      dists.push_back((points.row(i) - points.row(j)).norm());
  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
  return dists[mid];
}

std::vector<std::pair<int, double>> neighbor_weights(
    const Eigen::VectorXd& x, const Eigen::MatrixXd& L,
    const SimilarityKernel& kernel) {
  const int n = static_cast<int>(L.rows());
  if (n < 1) throw std::invalid_argument("neighbor_weights: empty labeled set");
  if (kernel.k < 1 || kernel.bandwidth <= 0)
    throw std::invalid_argument("neighbor_weights: need k >= 1 and bandwidth > 0");

  Eigen::VectorXd d2 = (L.rowwise() - x.transpose()).rowwise().squaredNorm();
  const int k = std::min(kernel.k, n);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](int a, int b) { return d2[a] < d2[b]; });

  std::vector<std::pair<int, double>> out(k);
  const double inv = 1.0 / (2.0 * kernel.bandwidth * kernel.bandwidth);
  double total = 0;
  for (int j = 0; j < k; ++j) {
    const double w = std::exp(-d2[order[j]] * inv);
    out[j] = {order[j], w};
    total += w;
  }
  if (total > 0) {
    for (auto& [idx, w] : out) w /= total;
  } else {
    for (auto& [idx, w] : out) w = 1.0 / k;
  }
  return out;
}

double estimate_accuracy(int labeler_index, const Eigen::VectorXd& x,
                         const ResponseMatrix& responses,
                         const std::vector<int>& truth_on_initial,
                         const Eigen::MatrixXd& initial_features,
                         const SimilarityKernel& kernel) {
  if (initial_features.rows() != responses.responses.cols())
    throw std::invalid_argument("estimate_accuracy: response matrix does not cover L");
  double estimate = 0;
  for (const auto& [idx, w] : neighbor_weights(x, initial_features, kernel))
    if (responses.responses(labeler_index, idx) == truth_on_initial[idx])
      estimate += w;
  return estimate;
}

Eigen::MatrixXd estimate_all(const ResponseMatrix& responses,
                             const std::vector<int>& truth_on_initial,
                             const Eigen::MatrixXd& initial_features,
                             const Eigen::MatrixXd& pool_features,
                             const SimilarityKernel& kernel) {
  const int labelers = static_cast<int>(responses.responses.rows());
  const int pool = static_cast<int>(pool_features.rows());
  Eigen::MatrixXd estimates(labelers, pool);
  for (int j = 0; j < pool; ++j) {
    const Eigen::VectorXd x = pool_features.row(j).transpose();
    const auto weights = neighbor_weights(x, initial_features, kernel);
    for (int li = 0; li < labelers; ++li) {
      double e = 0;
      for (const auto& [idx, w] : weights)
        if (responses.responses(li, idx) == truth_on_initial[idx]) e += w;
      estimates(li, j) = e;
    }
  }
  return estimates;
}

}  // namespace cal
