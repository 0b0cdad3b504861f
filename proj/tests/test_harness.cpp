#include <doctest.h>

#include <cstdlib>
#include <set>

#include "cal/classifier.hpp"
#include "cal/harness.hpp"

using namespace cal;

namespace {

// Small synthetic experiment that runs in well under a second.
ExperimentConfig small_config() {
  ExperimentConfig config;
  config.source = "synthetic";
  config.synth_per_class = 60;
  config.synth_dim = 4;
  config.synth_separation = 4.0;
  config.budget = 20;
  config.runs = 2;
  config.seed = 11;
  config.strategy = "agb";
  config.max_iters = 80;
  config.sim.clusters = 6;
  return config;
}

}  // namespace

TEST_CASE("zero budget acquires nothing") {
  ExperimentConfig config = small_config();
  config.budget = 0;
  const RunTrace trace = run_once(config, 1);
  CHECK(trace.records.empty());
  CHECK(trace.summary.queries == 0);
  CHECK(trace.summary.total_cost == 0.0);
  CHECK(trace.initial_test_accuracy > 0.0);
}

TEST_CASE("single perfect unit-cost labeler spends the budget one query at a time") {
  ExperimentConfig config = small_config();
  config.budget = 5;
  config.strategy = "gb";
  config.sim.costs = {1};
  config.sim.p_expert = {1.0};
  config.sim.p_nonexpert = {1.0};
  config.sim.expert_fraction = {1.0};

  const RunTrace trace = run_once(config, 3);
  REQUIRE(trace.records.size() == 5);
  for (const auto& rec : trace.records) {
    CHECK(rec.labeler_id == 0);
    CHECK(rec.cost_spent == 1.0);
    CHECK(rec.label_correct);
  }
  CHECK(trace.summary.total_cost == doctest::Approx(5.0));
  CHECK(trace.summary.mean_label_accuracy == doctest::Approx(1.0));
}

TEST_CASE("trace ledger is internally consistent") {
  for (const char* strategy : {"gb", "agb", "ceal", "alc", "all", "random"}) {
    ExperimentConfig config = small_config();
    config.strategy = strategy;
    const RunTrace trace = run_once(config, 7);

    double running = 0;
    int iteration = 0;
    int correct = 0;
    std::set<int> acquired;
    for (const auto& rec : trace.records) {
      CHECK(rec.iteration == ++iteration);
      running += rec.cost_spent;
      CHECK(rec.cumulative_cost == doctest::Approx(running).epsilon(1e-12));
      CHECK(rec.cost_spent > 0.0);
      CHECK(acquired.insert(rec.instance_id).second);  // each instance once
      if (rec.label_correct) ++correct;
      CHECK(rec.test_accuracy >= 0.0);
      CHECK(rec.test_accuracy <= 1.0);
    }
    CHECK(running <= config.budget + 1e-12);
    CHECK(trace.summary.queries == iteration);
    CHECK(trace.summary.total_cost == doctest::Approx(running));
    if (iteration > 0) {
      CHECK(trace.summary.mean_cost_per_query ==
            doctest::Approx(running / iteration));
      CHECK(trace.summary.mean_label_accuracy ==
            doctest::Approx(correct / static_cast<double>(iteration)));
      CHECK(trace.summary.final_test_accuracy ==
            doctest::Approx(trace.records.back().test_accuracy));
    }
  }
}

TEST_CASE("run_once is deterministic for a fixed seed") {
  const ExperimentConfig config = small_config();
  const RunTrace a = run_once(config, 19);
  const RunTrace b = run_once(config, 19);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].instance_id == b.records[i].instance_id);
    CHECK(a.records[i].labeler_id == b.records[i].labeler_id);
    CHECK(a.records[i].test_accuracy == b.records[i].test_accuracy);
  }
  CHECK(a.initial_test_accuracy == b.initial_test_accuracy);

  const RunTrace c = run_once(config, 20);
  std::vector<int> ids_a, ids_c;
  for (const auto& rec : a.records) ids_a.push_back(rec.instance_id);
  for (const auto& rec : c.records) ids_c.push_back(rec.instance_id);
  CHECK(ids_a != ids_c);
}

TEST_CASE("max_queries caps the loop before the budget does") {
  ExperimentConfig config = small_config();
  config.max_queries = 3;
  const RunTrace trace = run_once(config, 5);
  CHECK(trace.records.size() == 3);
}

TEST_CASE("run_many aggregates one run as that run") {
  ExperimentConfig config = small_config();
  config.runs = 1;
  config.strategy = "random";
  const AggregateResult agg = run_many(config);
  const RunTrace solo = run_once(config, config.seed);

  REQUIRE(agg.traces.size() == 1);
  CHECK(agg.strategy == "random");
  CHECK(agg.mean_queries == doctest::Approx(solo.summary.queries));
  CHECK(agg.mean_cost_per_query == doctest::Approx(solo.summary.mean_cost_per_query));
  CHECK(agg.mean_final_accuracy == doctest::Approx(solo.summary.final_test_accuracy));

  REQUIRE(agg.curve_cost.size() == 100);
  REQUIRE(agg.curve_accuracy.size() == 100);
  CHECK(agg.curve_cost.front() == 0.0);
  CHECK(agg.curve_cost.back() == doctest::Approx(config.budget));
  // Carried-forward curve starts at the pre-acquisition accuracy and ends at
  // the final one.
  CHECK(agg.curve_accuracy.front() == doctest::Approx(solo.initial_test_accuracy));
  CHECK(agg.curve_accuracy.back() ==
        doctest::Approx(solo.summary.final_test_accuracy));
}

TEST_CASE("run_many output does not depend on the thread count") {
  ExperimentConfig config = small_config();
  config.runs = 3;
  setenv("COSTWISE_AL_THREADS", "1", 1);
  const AggregateResult serial = run_many(config);
  setenv("COSTWISE_AL_THREADS", "3", 1);
  const AggregateResult parallel = run_many(config);
  unsetenv("COSTWISE_AL_THREADS");

  REQUIRE(serial.traces.size() == parallel.traces.size());
  CHECK(serial.mean_final_accuracy == parallel.mean_final_accuracy);
  CHECK(serial.curve_accuracy == parallel.curve_accuracy);
  for (std::size_t r = 0; r < serial.traces.size(); ++r)
    CHECK(serial.traces[r].summary.total_cost ==
          parallel.traces[r].summary.total_cost);
}

TEST_CASE("compare reuses identical per-seed splits and labelers") {
  ExperimentConfig config = small_config();
  config.runs = 2;
  const auto results = compare(config, {"ceal", "random"});
  REQUIRE(results.size() == 2);
  CHECK(results[0].strategy == "ceal");
  CHECK(results[1].strategy == "random");
  // Same seed, same data: identical starting accuracy before any acquisition.
  for (std::size_t r = 0; r < 2; ++r)
    CHECK(results[0].traces[r].initial_test_accuracy ==
          results[1].traces[r].initial_test_accuracy);
}

TEST_CASE("well-separated synthetic data trains to near-perfect accuracy") {
  Rng rng(29);
  const Dataset d = make_synthetic(2, 150, 4, 10.0, rng);
  Rng srng(30);
  const Split s = split_dataset(d, {0.5, 0.2, 0.3}, srng);

  Eigen::MatrixXd X(s.initial.size(), d.dim());
  std::vector<int> y;
  for (std::size_t i = 0; i < s.initial.size(); ++i) {
    X.row(i) = d.features.row(s.initial[i]);
    y.push_back(d.labels[s.initial[i]]);
  }
  const LogisticModel model = fit(X, y, 2);

  Eigen::MatrixXd T(s.test.size(), d.dim());
  std::vector<int> ty;
  for (std::size_t i = 0; i < s.test.size(); ++i) {
    T.row(i) = d.features.row(s.test[i]);
    ty.push_back(d.labels[s.test[i]]);
  }
  CHECK(evaluate(model, T, ty) >= 0.99);
}

TEST_CASE("prepare_data standardizes csv features") {
  ExperimentConfig config;
  config.source = "synthetic";
  const PreparedData empty = prepare_data(config);
  CHECK(empty.dataset.size() == 0);  // synthetic data is generated per seed
}
