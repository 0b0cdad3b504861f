#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "cal/dataset.hpp"
#include "cal/rng.hpp"

using namespace cal;

namespace {

Dataset tiny_dataset(int n, int classes = 2) {
  Dataset d;
  d.features = Eigen::MatrixXd::Random(n, 3);
  d.class_count = classes;
  for (int i = 0; i < n; ++i) d.labels.push_back(i % classes);
  return d;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("cal_test_" + name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("rng determinism and derive independence") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng c(42);
  Rng d1 = c.derive(1), d2 = c.derive(2);
  CHECK(d1.next_u64() != d2.next_u64());

  Rng u(7);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(u.uniform_index(5) < 5);
  }
}

TEST_CASE("split sizes: floors with remainder to pool") {
  Dataset d = tiny_dataset(1000);
  Rng rng(1);
  const Split s = split_dataset(d, {0.05, 0.65, 0.30}, rng);
  CHECK(s.initial.size() == 50);
  CHECK(s.pool.size() == 650);
  CHECK(s.test.size() == 300);

  Dataset d2 = tiny_dataset(20);
  Rng rng2(1);
  const Split s2 = split_dataset(d2, {0.5, 0.25, 0.25}, rng2);
  CHECK(s2.initial.size() == 10);
  CHECK(s2.pool.size() == 5);
  CHECK(s2.test.size() == 5);

  // N=103 with 5/65/30: floors 5 and 30, remainder lands in pool.
  Dataset d3 = tiny_dataset(103);
  Rng rng3(1);
  const Split s3 = split_dataset(d3, {0.05, 0.65, 0.30}, rng3);
  CHECK(s3.initial.size() == 5);
  CHECK(s3.test.size() == 30);
  CHECK(s3.pool.size() == 103 - 5 - 30);
}

TEST_CASE("split is an exact disjoint partition") {
  Dataset d = tiny_dataset(137, 3);
  Rng rng(9);
  const Split s = split_dataset(d, {0.1, 0.6, 0.3}, rng);
  std::set<int> seen;
  for (const auto* part : {&s.initial, &s.pool, &s.test})
    for (int i : *part) CHECK(seen.insert(i).second);
  CHECK(seen.size() == 137);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 136);
}

TEST_CASE("split determinism and initial-set class coverage") {
  Dataset d = tiny_dataset(200, 4);
  Rng a(5), b(5);
  const Split s1 = split_dataset(d, {0.05, 0.65, 0.30}, a);
  const Split s2 = split_dataset(d, {0.05, 0.65, 0.30}, b);
  CHECK(s1.initial == s2.initial);
  CHECK(s1.pool == s2.pool);
  CHECK(s1.test == s2.test);

  std::set<int> classes;
  for (int i : s1.initial) classes.insert(d.labels[i]);
  CHECK(classes.size() >= 2);
}

TEST_CASE("split errors") {
  Dataset d = tiny_dataset(100);
  Rng rng(1);
  CHECK_THROWS(split_dataset(d, {0.5, 0.4, 0.2}, rng));  // sums to 1.1
  Dataset tiny = tiny_dataset(4);
  CHECK_THROWS(split_dataset(tiny, {0.05, 0.65, 0.30}, rng));  // initial empty

  // Single-class data can never give a 2-class initial set.
  Dataset mono = tiny_dataset(100, 2);
  for (auto& y : mono.labels) y = 0;
  CHECK_THROWS(split_dataset(mono, {0.1, 0.6, 0.3}, rng));
}

TEST_CASE("standardize basics") {
  Dataset d;
  d.features.resize(2, 2);
  d.features << 1, 5, 3, 5;
  d.labels = {0, 1};
  d.class_count = 2;
  StandardizeStats stats;
  const Dataset z = standardize(d, &stats);
  CHECK(z.features(0, 0) == doctest::Approx(-1.0));
  CHECK(z.features(1, 0) == doctest::Approx(1.0));
  CHECK(z.features(0, 1) == 0.0);  // constant column
  CHECK(z.features(1, 1) == 0.0);
  CHECK(stats.mean[0] == doctest::Approx(2.0));
  CHECK(stats.stddev[0] == doctest::Approx(1.0));  // population std
}

TEST_CASE("standardize: zero means and idempotence") {
  Dataset d = tiny_dataset(50);
  d.features = d.features * 3.0;
  d.features.array() += 7.0;
  const Dataset z = standardize(d);
  for (int j = 0; j < z.dim(); ++j)
    CHECK(std::abs(z.features.col(j).mean()) <= 1e-12);
  const Dataset zz = standardize(z);
  CHECK((zz.features - z.features).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("standardize rejects non-finite input") {
  Dataset d = tiny_dataset(5);
  d.features(2, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(standardize(d));
}

TEST_CASE("load_csv: numeric features and sorted label mapping") {
  TempFile f("numeric.csv", "a,b,label\n1.5,2,yes\n0.5,3,no\n");
  const Dataset d = load_csv(f.path, "label");
  CHECK(d.size() == 2);
  CHECK(d.dim() == 2);
  CHECK(d.class_count == 2);
  // Sorted distinct values: no -> 0, yes -> 1.
  CHECK(d.class_names == std::vector<std::string>{"no", "yes"});
  CHECK(d.labels == std::vector<int>{1, 0});
  CHECK(d.features(0, 0) == doctest::Approx(1.5));
}

TEST_CASE("load_csv: categorical one-hot in sorted category order") {
  TempFile f("cat.csv", "color,n,label\nred,1,0\nblue,2,1\ngreen,3,0\nred,4,1\n");
  const Dataset d = load_csv(f.path, "label");
  // 3 categories + 1 numeric column.
  CHECK(d.dim() == 4);
  CHECK(d.feature_names ==
        std::vector<std::string>{"color=blue", "color=green", "color=red", "n"});
  CHECK(d.features(0, 2) == 1.0);  // first row is red
  CHECK(d.features(0, 0) == 0.0);
  CHECK(d.features(1, 0) == 1.0);  // second row is blue
  // Each one-hot row sums to 1 over the color block.
  for (int i = 0; i < d.size(); ++i)
    CHECK(d.features.row(i).head(3).sum() == doctest::Approx(1.0));
}

TEST_CASE("load_csv errors") {
  CHECK_THROWS(load_csv("does_not_exist.csv", "label"));
  TempFile f("nolabel.csv", "a,b\n1,2\n");
  CHECK_THROWS(load_csv(f.path, "label"));
  TempFile g("ragged.csv", "a,label\n1,0\n1,2,3\n");
  CHECK_THROWS(load_csv(g.path, "label"));
}

TEST_CASE("make_synthetic shape and determinism") {
  Rng a(3), b(3);
  const Dataset d1 = make_synthetic(2, 100, 2, 10.0, a);
  const Dataset d2 = make_synthetic(2, 100, 2, 10.0, b);
  CHECK(d1.size() == 200);
  CHECK(d1.dim() == 2);
  CHECK(d1.class_count == 2);
  CHECK((d1.features - d2.features).cwiseAbs().maxCoeff() == 0.0);
  CHECK(d1.labels == d2.labels);
}
