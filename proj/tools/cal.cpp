#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "cal/classifier.hpp"
#include "cal/config.hpp"
#include "cal/estimator.hpp"
#include "cal/harness.hpp"
#include "cal/svg.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::uint64_t seed = 0;
  int runs = 0;
  double budget = 0;
  std::string strategy;
  std::string label_col;
  long long max_queries = 0;
  bool has_seed = false, has_runs = false, has_budget = false, has_strategy = false,
       has_label_col = false, has_max_queries = false;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--seed", ov.seed, "Base seed override")
      ->each([&](const std::string&) { ov.has_seed = true; });
  cmd->add_option("--runs", ov.runs, "Replication count override")
      ->each([&](const std::string&) { ov.has_runs = true; });
  cmd->add_option("--budget", ov.budget, "Budget override (cost units)")
      ->each([&](const std::string&) { ov.has_budget = true; });
  cmd->add_option("--strategy", ov.strategy,
                  "Strategy override (gb|agb|ceal|alc|all|random)")
      ->each([&](const std::string&) { ov.has_strategy = true; });
  cmd->add_option("--label-col", ov.label_col, "Label column name override")
      ->each([&](const std::string&) { ov.has_label_col = true; });
  cmd->add_option("--max-queries", ov.max_queries, "Optional query cap override")
      ->each([&](const std::string&) { ov.has_max_queries = true; });
}

cal::ExperimentConfig resolve(const std::string& config_path, const Overrides& ov) {
  cal::ExperimentConfig config = cal::load_config(config_path);
  if (ov.has_seed) config.seed = ov.seed;
  if (ov.has_runs) config.runs = ov.runs;
  if (ov.has_budget) config.budget = ov.budget;
  if (ov.has_strategy) config.strategy = ov.strategy;
  if (ov.has_label_col) config.label_col = ov.label_col;
  if (ov.has_max_queries) config.max_queries = ov.max_queries;
  cal::validate_config(config);
  return config;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::vector<cal::CurveSeries> to_series(const std::vector<cal::AggregateResult>& rs) {
  std::vector<cal::CurveSeries> series;
  for (const auto& r : rs) series.push_back({r.strategy, r.curve_cost, r.curve_accuracy});
  return series;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const Overrides& ov) {
  const cal::ExperimentConfig config = resolve(config_path, ov);
  const cal::AggregateResult result = cal::run_many(config);
  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  cal::write_trace_csv((out / "trace.csv").string(), result.traces);
  cal::write_summary_csv((out / "summary.csv").string(), {result});
  cal::write_curve_csv((out / "curve.csv").string(), {result});
  write_text(out / "manifest.txt", cal::manifest_text(config));
  return 0;
}

int cmd_compare(const std::string& config_path, const std::string& out_dir,
                const Overrides& ov) {
  const cal::ExperimentConfig config = resolve(config_path, ov);
  if (config.strategies.size() < 2)
    throw cal::ConfigError(
        "field 'experiment.strategies' must list at least 2 strategies for compare");
  const auto results = cal::compare(config, config.strategies);
  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  cal::write_summary_csv((out / "summary.csv").string(), results);
  cal::write_curve_csv((out / "curve.csv").string(), results);
  cal::write_svg((out / "curves.svg").string(), to_series(results));
  for (const auto& result : results)
    cal::write_trace_csv((out / ("trace_" + result.strategy + ".csv")).string(),
                         result.traces);
  write_text(out / "manifest.txt", cal::manifest_text(config));
  return 0;
}

// One seed's labeler simulation, dumped for inspection: the expertise draw
// and every labeler's responses on the initial set.
int cmd_simulate_labels(const std::string& config_path, const std::string& out_dir,
                        const Overrides& ov) {
  const cal::ExperimentConfig config = resolve(config_path, ov);
  if (config.source == "recorded")
    throw cal::ConfigError("simulate-labels applies to simulated sources only");

  const cal::Rng root(config.seed);
  cal::Dataset data;
  if (config.source == "synthetic") {
    cal::Rng data_rng = root.derive(0);
    data = cal::standardize(cal::make_synthetic(
        config.synth_blobs, config.synth_per_class, config.synth_dim,
        config.synth_separation, data_rng));
  } else {
    data = cal::standardize(cal::load_csv(config.dataset_path, config.label_col));
  }
  cal::Rng split_rng = root.derive(1);
  const cal::Split split = cal::split_dataset(data, config.fractions, split_rng);
  cal::Rng cluster_rng = root.derive(2);
  const auto assignment = cal::kmeans(data.features, config.sim.clusters, cluster_rng);
  cal::Rng labeler_rng = root.derive(3);
  const auto labelers = cal::make_simulated_labelers(
      assignment, config.sim.costs, config.sim.p_expert, config.sim.p_nonexpert,
      config.sim.expert_fraction, labeler_rng);
  cal::Rng response_rng = root.derive(4);
  const auto responses = cal::build_response_matrix(
      labelers, assignment, split.initial, data.labels, data.class_count,
      response_rng);

  fs::create_directories(out_dir);
  const fs::path out(out_dir);

  std::ostringstream lab;
  lab << "labeler,cost,p_expert,p_nonexpert,realized_expert_fraction,"
         "accuracy_on_initial\n";
  for (std::size_t li = 0; li < labelers.size(); ++li) {
    const auto& exp = std::get<cal::SimulatedExpertise>(labelers[li].source);
    int experts = 0;
    for (char e : exp.expert_cluster) experts += e;
    int correct = 0;
    for (int j = 0; j < responses.responses.cols(); ++j)
      if (responses.responses(static_cast<int>(li), j) ==
          data.labels[responses.instance_ids[j]])
        ++correct;
    lab << labelers[li].id << ',' << labelers[li].cost << ',' << exp.p_expert << ','
        << exp.p_nonexpert << ','
        << static_cast<double>(experts) / static_cast<double>(exp.expert_cluster.size())
        << ','
        << static_cast<double>(correct) / static_cast<double>(responses.responses.cols())
        << '\n';
  }
  write_text(out / "labelers.csv", lab.str());

  std::ostringstream resp;
  resp << "instance_id,truth";
  for (const auto& labeler : labelers) resp << ",w" << labeler.id;
  resp << '\n';
  for (int j = 0; j < responses.responses.cols(); ++j) {
    resp << responses.instance_ids[j] << ',' << data.labels[responses.instance_ids[j]];
    for (int li = 0; li < responses.responses.rows(); ++li)
      resp << ',' << responses.responses(li, j);
    resp << '\n';
  }
  write_text(out / "responses.csv", resp.str());
  write_text(out / "manifest.txt", cal::manifest_text(config));
  return 0;
}

// Recompute a summary row from an emitted trace file.
int cmd_report(const std::string& trace_path, const std::string& strategy,
               const std::string& out_path) {
  std::ifstream in(trace_path);
  if (!in) throw std::runtime_error("cannot open trace file: " + trace_path);
  std::string line;
  if (!std::getline(in, line) ||
      line.rfind("run,iteration,instance_id,labeler_id,cost,cum_cost", 0) != 0)
    throw cal::ConfigError("not a trace CSV: " + trace_path);

  struct PerRun {
    int queries = 0;
    double cost = 0;
    int correct = 0;
    double final_accuracy = 0;
  };
  std::map<int, PerRun> runs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8)
      throw cal::ConfigError("malformed trace row: " + line);
    PerRun& pr = runs[std::stoi(cells[0])];
    ++pr.queries;
    pr.cost += std::stod(cells[4]);
    pr.correct += std::stoi(cells[6]);
    pr.final_accuracy = std::stod(cells[7]);
  }
  if (runs.empty()) throw cal::ConfigError("trace has no records: " + trace_path);

  cal::AggregateResult result;
  result.strategy = strategy;
  for (const auto& [run, pr] : runs) {
    result.mean_queries += pr.queries;
    result.mean_cost_per_query += pr.queries ? pr.cost / pr.queries : 0;
    result.mean_label_accuracy +=
        pr.queries ? static_cast<double>(pr.correct) / pr.queries : 0;
    result.mean_final_accuracy += pr.final_accuracy;
  }
  const double n = static_cast<double>(runs.size());
  result.mean_queries /= n;
  result.mean_cost_per_query /= n;
  result.mean_label_accuracy /= n;
  result.mean_final_accuracy /= n;
  cal::write_summary_csv(out_path, {result});
  return 0;
}

int cmd_plot(const std::string& curve_path, const std::string& out_path) {
  std::vector<cal::CurveSeries> series;
  try {
    series = cal::read_curve_csv(curve_path);
  } catch (const std::exception& e) {
    // Malformed or empty input is a usage error, not a runtime failure.
    throw cal::ConfigError(e.what());
  }
  cal::write_svg(out_path, series);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cost-effective active learning with noisy labelers"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  Overrides ov;

  auto* run = app.add_subcommand("run", "Run one strategy and write trace/summary/curve");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--out", out_dir, "Output directory");
  add_override_flags(run, ov);

  auto* cmp = app.add_subcommand("compare", "Run several strategies on shared seeds");
  cmp->add_option("--config", config_path, "Config file")->required();
  cmp->add_option("--out", out_dir, "Output directory");
  add_override_flags(cmp, ov);

  auto* sim = app.add_subcommand("simulate-labels",
                                 "Dump one seed's simulated labelers and responses");
  sim->add_option("--config", config_path, "Config file")->required();
  sim->add_option("--out", out_dir, "Output directory");
  add_override_flags(sim, ov);

  std::string trace_path, strategy_name = "unknown", report_out = "summary.csv";
  auto* rep = app.add_subcommand("report", "Recompute a summary from a trace CSV");
  rep->add_option("--trace", trace_path, "Trace CSV")->required();
  rep->add_option("--strategy", strategy_name, "Strategy name for the summary row");
  rep->add_option("--out", report_out, "Output summary CSV");

  std::string curve_path, svg_path = "curves.svg";
  auto* plot = app.add_subcommand("plot", "Render a curve CSV as an SVG chart");
  plot->add_option("--curve", curve_path, "Curve CSV")->required();
  plot->add_option("--out", svg_path, "Output SVG");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, ov);
    if (cmp->parsed()) return cmd_compare(config_path, out_dir, ov);
    if (sim->parsed()) return cmd_simulate_labels(config_path, out_dir, ov);
    if (rep->parsed()) return cmd_report(trace_path, strategy_name, report_out);
    if (plot->parsed()) return cmd_plot(curve_path, svg_path);
  } catch (const cal::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
