#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <string>
#include <vector>

#include "cal/rng.hpp"

namespace cal {

// Feature matrix with ground-truth labels. Features are unitless
// (post one-hot expansion and standardization).
struct Dataset {
  Eigen::MatrixXd features;          // N x d
  std::vector<int> labels;           // size N, values in [0, class_count)
  int class_count = 0;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;  // original label value per class index

  int size() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }
};

// Disjoint index sets covering the whole dataset.
struct Split {
  std::vector<int> initial;  // ground-truth labeled seed set
  std::vector<int> pool;     // unlabeled, available for acquisition
  std::vector<int> test;
};

struct StandardizeStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;  // population std; 0 marks a constant column
};

// Seeded shuffle split with floor-sized parts; remainder rows go to the pool.
// Reshuffles (up to 100 attempts) until the initial set holds >= 2 classes.
Split split_dataset(const Dataset& dataset, const std::array<double, 3>& fractions,
                    Rng& rng);

// Column-wise zero mean / unit population std. Constant columns map to zero.
Dataset standardize(const Dataset& dataset, StandardizeStats* stats_out = nullptr);

// CSV with header row; categorical feature columns are one-hot expanded in
// sorted category order, labels mapped to class indices by sorted value order.
Dataset load_csv(const std::string& path, const std::string& label_column);

// Metadata sidecar (JSON): feature names, class map, standardization stats.
void write_metadata(const Dataset& dataset, const StandardizeStats& stats,
                    const std::string& path);

// Isotropic unit-variance Gaussian blobs, one class per blob, pairwise
// center distance `separation`.
Dataset make_synthetic(int blob_count, int per_class, int dim, double separation,
                       Rng& rng);

}  // namespace cal
