#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cal/dataset.hpp"
#include "cal/oracle.hpp"
#include "cal/strategies.hpp"

namespace cal {

// Cluster-expertise simulator settings; defaults follow the five cost tiers
// with graded expert coverage so pricier labelers are broadly more accurate.
struct SimulationParams {
  int clusters = 30;
  std::vector<double> costs{5, 4, 3, 2, 1};
  std::vector<double> p_expert{0.95, 0.925, 0.9, 0.875, 0.85};
  std::vector<double> p_nonexpert{0.61, 0.585, 0.56, 0.535, 0.51};
  std::vector<double> expert_fraction{0.9, 0.75, 0.55, 0.4, 0.2};
};

struct ExperimentConfig {
  // dataset
  std::string source = "synthetic";  // synthetic | csv | recorded
  std::string dataset_path;          // feature/label CSV (csv, recorded)
  std::string responses_path;        // annotator CSV (recorded)
  std::string label_col = "label";
  std::vector<double> cost_override;  // recorded: replaces accuracy-as-cost
  int synth_blobs = 2;
  int synth_per_class = 1000;
  int synth_dim = 10;
  double synth_separation = 3.0;

  // experiment
  std::string strategy = "agb";
  std::vector<std::string> strategies;  // compare mode
  double budget = 200;
  int runs = 20;
  std::uint64_t seed = 1;
  long long max_queries = 0;  // 0 = budget-only termination
  std::array<double, 3> fractions{0.05, 0.65, 0.30};

  // classifier
  double lambda = 1e-3;
  int max_iters = 500;
  double tol = 1e-6;

  // accuracy estimator
  int knn_k = 40;
  double knn_bandwidth = 0;  // 0 = median-pairwise-distance heuristic

  SimulationParams sim;

  // agb
  double agb_unit_budget = 0;  // 0 = 2 * max labeler cost
  bool agb_count_initial = true;
};

struct AcquisitionRecord {
  int iteration = 0;    // 1-based
  int instance_id = -1;
  int labeler_id = -1;  // -1 = majority vote over all labelers
  double cost_spent = 0;
  double cumulative_cost = 0;
  bool label_correct = false;  // vs ground truth, diagnostics only
  double test_accuracy = 0;
};

struct RunSummary {
  int queries = 0;
  double total_cost = 0;
  double mean_cost_per_query = 0;
  double mean_label_accuracy = 0;
  double final_test_accuracy = 0;
};

struct RunTrace {
  std::uint64_t seed = 0;
  double initial_test_accuracy = 0;  // before any acquisition
  std::vector<AcquisitionRecord> records;
  RunSummary summary;
};

struct AggregateResult {
  std::string strategy;
  double mean_cost_per_query = 0;
  double mean_label_accuracy = 0;
  double mean_queries = 0;
  double mean_final_accuracy = 0;
  std::vector<double> curve_cost;      // 100-point grid on [0, B]
  std::vector<double> curve_accuracy;  // pointwise mean, last value carried forward
  std::vector<RunTrace> traces;
};

// Dataset and labeler inputs shared across replications (loaded once).
struct PreparedData {
  Dataset dataset;                        // standardized
  StandardizeStats stats;
  std::vector<Labeler> recorded_labelers; // recorded mode only
};

PreparedData prepare_data(const ExperimentConfig& config);

// One full budgeted acquisition loop. `prepared` may be empty for synthetic
// sources (the dataset is generated per seed).
RunTrace run_once(const ExperimentConfig& config, std::uint64_t seed,
                  const PreparedData* prepared = nullptr);

// Replications with seeds base..base+R-1 (parallelism capped by the
// COSTWISE_AL_THREADS environment variable), aggregated on a common grid.
AggregateResult run_many(const ExperimentConfig& config);

// Identical (seed -> split, labeler draw) inputs for every strategy, so
// differences between rows are strategy-only.
std::vector<AggregateResult> compare(const ExperimentConfig& base,
                                     const std::vector<std::string>& strategies);

// Exact-format CSV emitters.
void write_trace_csv(const std::string& path, const std::vector<RunTrace>& traces);
void write_summary_csv(const std::string& path,
                       const std::vector<AggregateResult>& results);
void write_curve_csv(const std::string& path,
                     const std::vector<AggregateResult>& results);

}  // namespace cal
