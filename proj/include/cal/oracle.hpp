#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cal/rng.hpp"

namespace cal {

// Cluster-expertise noise model: high accuracy on expert clusters, lower
// (but still better than chance) elsewhere.
struct SimulatedExpertise {
  double p_expert = 1.0;
  double p_nonexpert = 1.0;
  std::vector<char> expert_cluster;  // per cluster index
};

// Pre-recorded responses of a real annotator, indexed by instance id.
struct RecordedResponses {
  std::vector<int> labels;
};

struct Labeler {
  int id = 0;
  double cost = 1.0;
  std::variant<SimulatedExpertise, std::shared_ptr<const RecordedResponses>> source;

  bool simulated() const {
    return std::holds_alternative<SimulatedExpertise>(source);
  }
};

// Every labeler's response on every initial-set instance, drawn once per run.
struct ResponseMatrix {
  std::vector<int> instance_ids;  // initial-set instance ids, column order
  Eigen::MatrixXi responses;      // labelers x |initial|
};

// Lloyd's algorithm with k-means++ seeded initialization. Empty clusters are
// repaired by stealing the point farthest from its center.
std::vector<int> kmeans(const Eigen::MatrixXd& features, int k, Rng& rng,
                        int max_iters = 100);

// One labeler per cost tier; each cluster independently marked expert with
// probability expert_fraction[i]. When 0 < fraction < 1 at least one expert
// and one non-expert cluster are forced by flipping a random cluster.
std::vector<Labeler> make_simulated_labelers(
    const std::vector<int>& cluster_assignment, const std::vector<double>& costs,
    const std::vector<double>& p_expert, const std::vector<double>& p_nonexpert,
    const std::vector<double>& expert_fraction, Rng& rng);

// Simulated: correct with the cluster-dependent probability, otherwise a
// uniform wrong class. Recorded: table lookup, rng untouched.
int respond(const Labeler& labeler, const std::vector<int>& cluster_assignment,
            int instance_id, int true_label, int class_count, Rng& rng);

ResponseMatrix build_response_matrix(const std::vector<Labeler>& labelers,
                                     const std::vector<int>& cluster_assignment,
                                     const std::vector<int>& initial_ids,
                                     const std::vector<int>& true_labels,
                                     int class_count, Rng& rng);

// Multi-annotator CSV: header `label,w1,...,wn`, integer class values.
// Worker cost = overall accuracy against the ground-truth column.
struct RecordedData {
  std::vector<int> labels;  // ground truth, row-aligned with the feature CSV
  int class_count = 0;
  std::vector<Labeler> labelers;
};
RecordedData load_recorded(const std::string& path);

}  // namespace cal
