#include "cal/oracle.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cal {

std::vector<int> kmeans(const Eigen::MatrixXd& X, int k, Rng& rng, int max_iters) {
  const int n = static_cast<int>(X.rows());
  if (k < 1 || k > n) throw std::invalid_argument("kmeans: need 1 <= K <= N");
  if (!X.allFinite()) throw std::invalid_argument("kmeans: non-finite features");

  // k-means++ seeding.
  Eigen::MatrixXd centers(k, X.cols());
  centers.row(0) = X.row(static_cast<int>(rng.uniform_index(n)));
  Eigen::VectorXd d2 =
      (X.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    int pick = 0;
    if (total > 0) {
      double target = rng.uniform() * total;
      double acc = 0;
      for (int i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<int>(rng.uniform_index(n));
    }
    centers.row(c) = X.row(pick);
    d2 = d2.cwiseMin((X.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> assign(n, 0);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (X.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (X.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    centers.setZero();
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      centers.row(assign[i]) += X.row(i);
      ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c)
      if (counts[c] > 0) centers.row(c) /= counts[c];
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      // Steal the point farthest from its own center.
      int far = -1;
      double far_d = -1;
      for (int i = 0; i < n; ++i) {
        if (counts[assign[i]] <= 1) continue;
        const double d = (X.row(i) - centers.row(assign[i])).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far >= 0) {
        --counts[assign[far]];
        assign[far] = c;
        counts[c] = 1;
        centers.row(c) = X.row(far);
      }
    }
  }
  return assign;
}

std::vector<Labeler> make_simulated_labelers(
    const std::vector<int>& cluster_assignment, const std::vector<double>& costs,
    const std::vector<double>& p_expert, const std::vector<double>& p_nonexpert,
    const std::vector<double>& expert_fraction, Rng& rng) {
  const std::size_t m = costs.size();
  if (p_expert.size() != m || p_nonexpert.size() != m || expert_fraction.size() != m)
    throw std::invalid_argument("make_simulated_labelers: list length mismatch");
  const int clusters =
      cluster_assignment.empty()
          ? 0
          : *std::max_element(cluster_assignment.begin(), cluster_assignment.end()) + 1;
  if (clusters < 1)
    throw std::invalid_argument("make_simulated_labelers: empty cluster assignment");

  std::vector<Labeler> labelers;
  labelers.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (costs[i] <= 0) throw std::invalid_argument("labeler cost must be positive");
    const double f = expert_fraction[i];
    if (f < 0 || f > 1)
      throw std::invalid_argument("expert fraction must lie in [0,1]");
    if (!(p_nonexpert[i] > 0.5) || p_nonexpert[i] > p_expert[i] || p_expert[i] > 1)
      throw std::invalid_argument("need 0.5 < p_nonexpert <= p_expert <= 1");

    SimulatedExpertise exp;
    exp.p_expert = p_expert[i];
    exp.p_nonexpert = p_nonexpert[i];
    exp.expert_cluster.resize(clusters);
    int experts = 0;
    for (int c = 0; c < clusters; ++c) {
      exp.expert_cluster[c] = rng.bernoulli(f) ? 1 : 0;
      experts += exp.expert_cluster[c];
    }
    if (f > 0 && f < 1 && clusters > 1) {
      // Keep the map genuinely mixed.
      if (experts == 0)
        exp.expert_cluster[rng.uniform_index(clusters)] = 1;
      else if (experts == clusters)
        exp.expert_cluster[rng.uniform_index(clusters)] = 0;
    }

    Labeler labeler;
    labeler.id = static_cast<int>(i);
    labeler.cost = costs[i];
    labeler.source = std::move(exp);
    labelers.push_back(std::move(labeler));
  }
  return labelers;
}

int respond(const Labeler& labeler, const std::vector<int>& cluster_assignment,
            int instance_id, int true_label, int class_count, Rng& rng) {
  if (true_label < 0 || true_label >= class_count)
    throw std::invalid_argument("respond: true label out of range");

  if (const auto* exp = std::get_if<SimulatedExpertise>(&labeler.source)) {
    const int cluster = cluster_assignment.at(instance_id);
    const bool is_expert = exp->expert_cluster.at(cluster) != 0;
    const double p = is_expert ? exp->p_expert : exp->p_nonexpert;
    if (rng.bernoulli(p)) return true_label;
    // Uniform over the wrong classes.
    const int offset = 1 + static_cast<int>(rng.uniform_index(class_count - 1));
    return (true_label + offset) % class_count;
  }

  const auto& table = std::get<std::shared_ptr<const RecordedResponses>>(labeler.source);
  if (!table || instance_id < 0 ||
      instance_id >= static_cast<int>(table->labels.size()))
    throw std::out_of_range("respond: recorded source has no entry for instance " +
                            std::to_string(instance_id));
  return table->labels[instance_id];
}

ResponseMatrix build_response_matrix(const std::vector<Labeler>& labelers,
                                     const std::vector<int>& cluster_assignment,
                                     const std::vector<int>& initial_ids,
                                     const std::vector<int>& true_labels,
                                     int class_count, Rng& rng) {
  if (initial_ids.empty())
    throw std::invalid_argument("build_response_matrix: empty initial set");
  ResponseMatrix matrix;
  matrix.instance_ids = initial_ids;
  matrix.responses.resize(static_cast<int>(labelers.size()),
                          static_cast<int>(initial_ids.size()));
  for (std::size_t li = 0; li < labelers.size(); ++li)
    for (std::size_t j = 0; j < initial_ids.size(); ++j)
      matrix.responses(static_cast<int>(li), static_cast<int>(j)) =
          respond(labelers[li], cluster_assignment, initial_ids[j],
                  true_labels[initial_ids[j]], class_count, rng);
  return matrix;
}

RecordedData load_recorded(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open responses file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty responses file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header[0] != "label")
    throw std::runtime_error("responses file needs header label,w1,...,wn: " + path);
  const int workers = static_cast<int>(header.size()) - 1;

  RecordedData data;
  std::vector<std::vector<int>> responses(workers);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<int> row;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const int v = std::stoi(cell, &used);
        if (used != cell.size() || v < 0) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": invalid class value '" + cell + "'");
      }
    }
    if (static_cast<int>(row.size()) != workers + 1)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": wrong number of columns");
    data.labels.push_back(row[0]);
    for (int w = 0; w < workers; ++w) responses[w].push_back(row[w + 1]);
  }
  if (data.labels.empty()) throw std::runtime_error("no data rows in " + path);

  int max_class = 0;
  for (int y : data.labels) max_class = std::max(max_class, y);
  for (const auto& col : responses)
    for (int y : col) max_class = std::max(max_class, y);
  data.class_count = max_class + 1;

  const int n = static_cast<int>(data.labels.size());
  for (int w = 0; w < workers; ++w) {
    int correct = 0;
    for (int i = 0; i < n; ++i)
      if (responses[w][i] == data.labels[i]) ++correct;
    const double accuracy = static_cast<double>(correct) / n;

    Labeler labeler;
    labeler.id = w;
    labeler.cost = accuracy;  // Focus-data convention; overridable in config
    auto table = std::make_shared<RecordedResponses>();
    table->labels = std::move(responses[w]);
    labeler.source = std::shared_ptr<const RecordedResponses>(std::move(table));
    data.labelers.push_back(std::move(labeler));
  }
  return data;
}

}  // namespace cal
