#include <doctest.h>

#include <cmath>

#include "cal/estimator.hpp"
#include "cal/rng.hpp"

using namespace cal;

TEST_CASE("single labeled instance gets weight 1") {
  Eigen::MatrixXd L(1, 2);
  L << 3.0, 4.0;
  const auto w = neighbor_weights(Eigen::Vector2d(0, 0), L, {10, 1.0});
  REQUIRE(w.size() == 1);
  CHECK(w[0].first == 0);
  CHECK(w[0].second == doctest::Approx(1.0));
}

TEST_CASE("equidistant neighbors split the weight evenly") {
  Eigen::MatrixXd L(2, 2);
  L << 1, 0, -1, 0;
  const auto w = neighbor_weights(Eigen::Vector2d(0, 0), L, {2, 0.7});
  REQUIRE(w.size() == 2);
  CHECK(w[0].second == doctest::Approx(0.5));
  CHECK(w[1].second == doctest::Approx(0.5));
}

TEST_CASE("gaussian weights at distances 0,1,2 with unit bandwidth") {
  Eigen::MatrixXd L(3, 1);
  L << 0, 1, 2;
  const auto w = neighbor_weights(Eigen::VectorXd::Zero(1), L, {3, 1.0});
  REQUIRE(w.size() == 3);
  // Independent evaluation of the kernel: exp(-d^2/2) normalized.
  const double raw0 = 1.0, raw1 = std::exp(-0.5), raw2 = std::exp(-2.0);
  const double total = raw0 + raw1 + raw2;
  CHECK(w[0].first == 0);
  CHECK(w[0].second == doctest::Approx(raw0 / total));
  CHECK(w[1].second == doctest::Approx(raw1 / total));
  CHECK(w[2].second == doctest::Approx(raw2 / total));
  // Matches the hand-rounded values.
  CHECK(w[0].second == doctest::Approx(0.5741).epsilon(1e-3));
  CHECK(w[1].second == doctest::Approx(0.3482).epsilon(1e-3));
  CHECK(w[2].second == doctest::Approx(0.0777).epsilon(1e-3));
}

TEST_CASE("weights always sum to 1, underflow falls back to uniform") {
  Rng rng(3);
  Eigen::MatrixXd L(40, 3);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 3; ++j) L(i, j) = rng.normal();
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x(3);
    for (int j = 0; j < 3; ++j) x[j] = 2.0 * rng.normal();
    const auto w = neighbor_weights(x, L, {7, 0.5});
    double total = 0;
    for (const auto& [idx, weight] : w) total += weight;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }

  // Distances large enough that every raw kernel value underflows.
  Eigen::MatrixXd far(3, 1);
  far << 1e6, 2e6, 3e6;
  const auto w = neighbor_weights(Eigen::VectorXd::Zero(1), far, {3, 1.0});
  for (const auto& [idx, weight] : w) CHECK(weight == doctest::Approx(1.0 / 3));
}

TEST_CASE("neighbor_weights errors") {
  Eigen::MatrixXd empty(0, 2);
  CHECK_THROWS(neighbor_weights(Eigen::Vector2d(0, 0), empty, {3, 1.0}));
  Eigen::MatrixXd L(1, 2);
  L.setZero();
  CHECK_THROWS(neighbor_weights(Eigen::Vector2d(0, 0), L, {0, 1.0}));
  CHECK_THROWS(neighbor_weights(Eigen::Vector2d(0, 0), L, {3, 0.0}));
}

namespace {

// One labeler whose responses on L are right/wrong per `correct`.
ResponseMatrix matrix_from_correctness(const std::vector<int>& truth,
                                       const std::vector<bool>& correct) {
  ResponseMatrix m;
  m.responses.resize(1, static_cast<int>(truth.size()));
  for (std::size_t j = 0; j < truth.size(); ++j) {
    m.instance_ids.push_back(static_cast<int>(j));
    m.responses(0, static_cast<int>(j)) = correct[j] ? truth[j] : 1 - truth[j];
  }
  return m;
}

}  // namespace

TEST_CASE("estimate equals weights dotted with correctness") {
  Rng rng(9);
  Eigen::MatrixXd L(12, 2);
  std::vector<int> truth(12);
  std::vector<bool> correct(12);
  for (int i = 0; i < 12; ++i) {
    L(i, 0) = rng.normal();
    L(i, 1) = rng.normal();
    truth[i] = static_cast<int>(rng.uniform_index(2));
    correct[i] = rng.bernoulli(0.7);
  }
  const auto m = matrix_from_correctness(truth, correct);
  const SimilarityKernel kernel{5, 0.8};
  const Eigen::VectorXd x = Eigen::Vector2d(0.3, -0.2);

  // Independent route: dot the weight vector with the correctness indicators.
  double expected = 0;
  for (const auto& [idx, w] : neighbor_weights(x, L, kernel))
    if (correct[idx]) expected += w;
  CHECK(estimate_accuracy(0, x, m, truth, L, kernel) == doctest::Approx(expected));
}

TEST_CASE("all-correct gives 1, all-wrong gives 0, bounds always hold") {
  Eigen::MatrixXd L(5, 1);
  L << 0, 1, 2, 3, 4;
  std::vector<int> truth{0, 1, 0, 1, 0};
  const SimilarityKernel kernel{5, 1.0};
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 1.5);

  const auto right = matrix_from_correctness(truth, {1, 1, 1, 1, 1});
  CHECK(estimate_accuracy(0, x, right, truth, L, kernel) == doctest::Approx(1.0));
  const auto wrong = matrix_from_correctness(truth, {0, 0, 0, 0, 0});
  CHECK(estimate_accuracy(0, x, wrong, truth, L, kernel) == doctest::Approx(0.0));

  const auto mixed = matrix_from_correctness(truth, {1, 0, 1, 0, 1});
  const double e = estimate_accuracy(0, x, mixed, truth, L, kernel);
  CHECK(e >= 0.0);
  CHECK(e <= 1.0);
}

TEST_CASE("equidistant neighbors reduce to the unweighted mean") {
  Eigen::MatrixXd L(4, 2);
  L << 1, 0, -1, 0, 0, 1, 0, -1;  // all at distance 1 from origin
  std::vector<int> truth{0, 0, 0, 0};
  const auto m = matrix_from_correctness(truth, {1, 1, 0, 0});
  const double e = estimate_accuracy(0, Eigen::Vector2d(0, 0), m, truth, L, {4, 1.0});
  CHECK(e == doctest::Approx(0.5));
}

TEST_CASE("estimate_all matches per-instance estimates") {
  Rng rng(13);
  Eigen::MatrixXd L(20, 3), pool(8, 3);
  std::vector<int> truth(20);
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 3; ++j) L(i, j) = rng.normal();
    truth[i] = static_cast<int>(rng.uniform_index(2));
  }
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 3; ++j) pool(i, j) = rng.normal();

  ResponseMatrix m;
  m.responses.resize(2, 20);
  for (int li = 0; li < 2; ++li)
    for (int j = 0; j < 20; ++j)
      m.responses(li, j) = rng.bernoulli(0.8) ? truth[j] : 1 - truth[j];
  for (int j = 0; j < 20; ++j) m.instance_ids.push_back(j);

  const SimilarityKernel kernel{6, 1.2};
  const Eigen::MatrixXd all = estimate_all(m, truth, L, pool, kernel);
  REQUIRE(all.rows() == 2);
  REQUIRE(all.cols() == 8);
  for (int li = 0; li < 2; ++li)
    for (int p = 0; p < 8; ++p) {
      const Eigen::VectorXd x = pool.row(p).transpose();
      CHECK(all(li, p) ==
            doctest::Approx(estimate_accuracy(li, x, m, truth, L, kernel)));
    }
}

TEST_CASE("median pairwise distance") {
  Eigen::MatrixXd P(3, 1);
  P << 0, 1, 3;  // pairwise distances 1, 2, 3
  CHECK(median_pairwise_distance(P) == doctest::Approx(2.0));
  Eigen::MatrixXd one(1, 1);
  one << 0;
  CHECK_THROWS(median_pairwise_distance(one));
}
