#include "cal/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "cal/classifier.hpp"
#include "cal/estimator.hpp"

namespace cal {

namespace {

// Fixed substream ids so every randomized stage draws from its own stream
// and strategy choice cannot perturb dataset or labeler generation.
enum Stream : std::uint64_t {
  kData = 0,
  kSplit = 1,
  kClusters = 2,
  kLabelers = 3,
  kResponses = 4,
  kLoop = 5,
};

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& X, const std::vector<int>& ids) {
  Eigen::MatrixXd out(static_cast<int>(ids.size()), X.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) out.row(i) = X.row(ids[i]);
  return out;
}

std::vector<int> gather(const std::vector<int>& v, const std::vector<int>& ids) {
  std::vector<int> out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(v[i]);
  return out;
}

int thread_budget(int runs) {
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (const char* env = std::getenv("COSTWISE_AL_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) threads = cap;
  }
  return std::min(threads, runs);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

PreparedData prepare_data(const ExperimentConfig& config) {
  PreparedData prepared;
  if (config.source == "synthetic") return prepared;

  if (config.source == "csv") {
    prepared.dataset = standardize(load_csv(config.dataset_path, config.label_col),
                                   &prepared.stats);
    return prepared;
  }

  if (config.source == "recorded") {
    RecordedData recorded = load_recorded(config.responses_path);
    Dataset features = load_csv(config.dataset_path, "");
    if (features.size() != static_cast<int>(recorded.labels.size()))
      throw std::runtime_error("feature CSV and responses CSV row counts differ");
    features.labels = recorded.labels;
    features.class_count = recorded.class_count;
    prepared.dataset = standardize(features, &prepared.stats);
    prepared.recorded_labelers = std::move(recorded.labelers);
    if (!config.cost_override.empty()) {
      if (config.cost_override.size() != prepared.recorded_labelers.size())
        throw std::runtime_error("cost override length does not match worker count");
      for (std::size_t i = 0; i < prepared.recorded_labelers.size(); ++i)
        prepared.recorded_labelers[i].cost = config.cost_override[i];
    }
    return prepared;
  }

  throw std::invalid_argument("unknown dataset source '" + config.source +
                              "' (expected synthetic|csv|recorded)");
}

RunTrace run_once(const ExperimentConfig& config, std::uint64_t seed,
                  const PreparedData* prepared) {
  if (config.budget < 0) throw std::invalid_argument("budget must be nonnegative");
  const Strategy strategy = parse_strategy(config.strategy);
  const Rng root(seed);

  Dataset data;
  if (config.source == "synthetic") {
    Rng data_rng = root.derive(kData);
    data = standardize(make_synthetic(config.synth_blobs, config.synth_per_class,
                                      config.synth_dim, config.synth_separation,
                                      data_rng));
  } else {
    if (!prepared) throw std::invalid_argument("run_once: prepared data required");
    data = prepared->dataset;
  }

  Rng split_rng = root.derive(kSplit);
  const Split split = split_dataset(data, config.fractions, split_rng);

  std::vector<int> cluster_assignment;
  std::vector<Labeler> labelers;
  if (config.source == "recorded") {
    labelers = prepared->recorded_labelers;
  } else {
    Rng cluster_rng = root.derive(kClusters);
    cluster_assignment = kmeans(data.features, config.sim.clusters, cluster_rng);
    Rng labeler_rng = root.derive(kLabelers);
    labelers = make_simulated_labelers(cluster_assignment, config.sim.costs,
                                       config.sim.p_expert, config.sim.p_nonexpert,
                                       config.sim.expert_fraction, labeler_rng);
  }

  Rng response_rng = root.derive(kResponses);
  const ResponseMatrix responses =
      build_response_matrix(labelers, cluster_assignment, split.initial,
                            data.labels, data.class_count, response_rng);

  const Eigen::MatrixXd initial_features = gather_rows(data.features, split.initial);
  const Eigen::MatrixXd pool_features = gather_rows(data.features, split.pool);
  const Eigen::MatrixXd test_features = gather_rows(data.features, split.test);
  const std::vector<int> test_labels = gather(data.labels, split.test);

  SimilarityKernel kernel{config.knn_k, config.knn_bandwidth};
  if (kernel.bandwidth <= 0)
    kernel.bandwidth = median_pairwise_distance(initial_features);

  // Column j holds ground-truth labels per response column; response columns
  // are ordered like split.initial.
  std::vector<int> truth_on_initial = gather(data.labels, split.initial);
  const Eigen::MatrixXd rho_cache = estimate_all(
      responses, truth_on_initial, initial_features, pool_features, kernel);

  std::vector<double> costs;
  for (const auto& labeler : labelers) costs.push_back(labeler.cost);
  double unit_budget = config.agb_unit_budget;
  if (unit_budget <= 0)
    unit_budget = 2.0 * *std::max_element(costs.begin(), costs.end());

  // Labeled set grows with acquired (possibly wrong) labels; each iteration
  // retrains from scratch.
  Eigen::MatrixXd train_features = initial_features;
  std::vector<int> train_labels = truth_on_initial;
  std::vector<int> alive(split.pool.size());
  for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = static_cast<int>(i);

  AgbState agb_state{1.0, config.agb_count_initial
                              ? static_cast<long long>(split.initial.size())
                              : 0};
  Rng loop_rng = root.derive(kLoop);

  RunTrace trace;
  trace.seed = seed;
  LogisticModel model = fit(train_features, train_labels, data.class_count,
                            config.lambda, config.max_iters, config.tol);
  trace.initial_test_accuracy = evaluate(model, test_features, test_labels);

  double remaining = config.budget;
  double cumulative = 0;
  int correct_count = 0;

  while (!alive.empty()) {
    if (config.max_queries > 0 &&
        static_cast<long long>(trace.records.size()) >= config.max_queries)
      break;

    SelectionContext ctx;
    ctx.remaining_budget = remaining;
    ctx.costs = costs;
    ctx.pool_ids.reserve(alive.size());
    ctx.uncertainty.resize(static_cast<int>(alive.size()));
    ctx.accuracy_estimate.resize(rho_cache.rows(), static_cast<int>(alive.size()));
    const Eigen::MatrixXd alive_features = [&] {
      Eigen::MatrixXd out(static_cast<int>(alive.size()), pool_features.cols());
      for (std::size_t i = 0; i < alive.size(); ++i)
        out.row(i) = pool_features.row(alive[i]);
      return out;
    }();
    const Eigen::VectorXd r = uncertainty(model, alive_features);
    for (std::size_t i = 0; i < alive.size(); ++i) {
      ctx.pool_ids.push_back(split.pool[alive[i]]);
      ctx.uncertainty[static_cast<int>(i)] = r[static_cast<int>(i)];
      ctx.accuracy_estimate.col(static_cast<int>(i)) = rho_cache.col(alive[i]);
    }

    const auto choice = select(strategy, ctx, agb_state, unit_budget, loop_rng);
    if (!choice) break;

    const int pool_index = alive[choice->pool_position];
    const int instance_id = split.pool[pool_index];
    const int true_label = data.labels[instance_id];

    int acquired = 0;
    if (choice->majority_all) {
      std::vector<int> votes;
      for (const auto& labeler : labelers)
        votes.push_back(respond(labeler, cluster_assignment, instance_id,
                                true_label, data.class_count, loop_rng));
      acquired = majority_vote(votes, loop_rng);
    } else {
      acquired = respond(labelers[choice->labeler_id], cluster_assignment,
                         instance_id, true_label, data.class_count, loop_rng);
    }

    remaining -= choice->cost;
    cumulative += choice->cost;

    train_features.conservativeResize(train_features.rows() + 1, Eigen::NoChange);
    train_features.row(train_features.rows() - 1) = data.features.row(instance_id);
    train_labels.push_back(acquired);
    alive.erase(alive.begin() + choice->pool_position);

    model = fit(train_features, train_labels, data.class_count, config.lambda,
                config.max_iters, config.tol);
    const double accuracy = evaluate(model, test_features, test_labels);

    AcquisitionRecord record;
    record.iteration = static_cast<int>(trace.records.size()) + 1;
    record.instance_id = instance_id;
    record.labeler_id = choice->majority_all ? -1 : choice->labeler_id;
    record.cost_spent = choice->cost;
    record.cumulative_cost = cumulative;
    record.label_correct = acquired == true_label;
    record.test_accuracy = accuracy;
    trace.records.push_back(record);
    if (record.label_correct) ++correct_count;

    if (strategy == Strategy::Agb)
      agb_state = update_agb(agb_state, rho_cache(choice->labeler_id, pool_index));
  }

  trace.summary.queries = static_cast<int>(trace.records.size());
  trace.summary.total_cost = cumulative;
  if (trace.summary.queries > 0) {
    trace.summary.mean_cost_per_query = cumulative / trace.summary.queries;
    trace.summary.mean_label_accuracy =
        static_cast<double>(correct_count) / trace.summary.queries;
    trace.summary.final_test_accuracy = trace.records.back().test_accuracy;
  } else {
    trace.summary.final_test_accuracy = trace.initial_test_accuracy;
  }
  return trace;
}

namespace {

// Step-function value of a trace at given cost (last value carried forward).
double accuracy_at_cost(const RunTrace& trace, double cost) {
  double acc = trace.initial_test_accuracy;
  for (const auto& record : trace.records) {
    if (record.cumulative_cost > cost) break;
    acc = record.test_accuracy;
  }
  return acc;
}

}  // namespace

AggregateResult run_many(const ExperimentConfig& config) {
  if (config.runs < 1) throw std::invalid_argument("runs must be >= 1");
  const PreparedData prepared = prepare_data(config);

  std::vector<RunTrace> traces(config.runs);
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= config.runs || failed.load()) return;
      const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(i);
      try {
        traces[i] = run_once(config, seed, &prepared);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failed.exchange(true))
          failure = "run with seed " + std::to_string(seed) + " failed: " + e.what();
        return;
      }
    }
  };

  const int threads = thread_budget(config.runs);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error(failure);

  AggregateResult result;
  result.strategy = config.strategy;
  for (const auto& trace : traces) {
    result.mean_cost_per_query += trace.summary.mean_cost_per_query;
    result.mean_label_accuracy += trace.summary.mean_label_accuracy;
    result.mean_queries += trace.summary.queries;
    result.mean_final_accuracy += trace.summary.final_test_accuracy;
  }
  const double r = static_cast<double>(config.runs);
  result.mean_cost_per_query /= r;
  result.mean_label_accuracy /= r;
  result.mean_queries /= r;
  result.mean_final_accuracy /= r;

  constexpr int kGridPoints = 100;
  for (int g = 0; g < kGridPoints; ++g) {
    const double cost = config.budget * g / (kGridPoints - 1);
    double mean = 0;
    for (const auto& trace : traces) mean += accuracy_at_cost(trace, cost);
    result.curve_cost.push_back(cost);
    result.curve_accuracy.push_back(mean / r);
  }
  result.traces = std::move(traces);
  return result;
}

std::vector<AggregateResult> compare(const ExperimentConfig& base,
                                     const std::vector<std::string>& strategies) {
  if (strategies.size() < 2)
    throw std::invalid_argument("compare needs at least 2 strategies");
  std::vector<AggregateResult> results;
  for (const auto& name : strategies) {
    ExperimentConfig config = base;
    config.strategy = name;
    results.push_back(run_many(config));
  }
  return results;
}

void write_trace_csv(const std::string& path, const std::vector<RunTrace>& traces) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  out << "run,iteration,instance_id,labeler_id,cost,cum_cost,label_correct,"
         "test_accuracy\n";
  for (std::size_t run = 0; run < traces.size(); ++run) {
    for (const auto& rec : traces[run].records) {
      out << run << ',' << rec.iteration << ',' << rec.instance_id << ',';
      if (rec.labeler_id < 0)
        out << "ALL";
      else
        out << rec.labeler_id;
      out << ',' << format_double(rec.cost_spent) << ','
          << format_double(rec.cumulative_cost) << ',' << (rec.label_correct ? 1 : 0)
          << ',' << format_double(rec.test_accuracy) << '\n';
    }
  }
}

void write_summary_csv(const std::string& path,
                       const std::vector<AggregateResult>& results) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write summary file: " + path);
  out << "strategy,mean_cost_per_query,mean_label_accuracy,mean_queries,"
         "mean_final_accuracy\n";
  for (const auto& res : results)
    out << res.strategy << ',' << format_double(res.mean_cost_per_query) << ','
        << format_double(res.mean_label_accuracy) << ','
        << format_double(res.mean_queries) << ','
        << format_double(res.mean_final_accuracy) << '\n';
}

void write_curve_csv(const std::string& path,
                     const std::vector<AggregateResult>& results) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write curve file: " + path);
  out << "strategy,cost,mean_accuracy\n";
  for (const auto& res : results)
    for (std::size_t g = 0; g < res.curve_cost.size(); ++g)
      out << res.strategy << ',' << format_double(res.curve_cost[g]) << ','
          << format_double(res.curve_accuracy[g]) << '\n';
}

}  // namespace cal
