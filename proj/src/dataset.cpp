#include "cal/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cal {

Split split_dataset(const Dataset& dataset, const std::array<double, 3>& fractions,
                    Rng& rng) {
  const int n = dataset.size();
  double sum = 0;
  for (double f : fractions) {
    if (f <= 0) throw std::invalid_argument("split fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("split fractions must sum to 1");

  const int n_init = static_cast<int>(std::floor(n * fractions[0]));
  const int n_test = static_cast<int>(std::floor(n * fractions[2]));
  const int n_pool = n - n_init - n_test;  // remainder lands here
  if (n_init < 1 || n_pool < 1 || n_test < 1)
    throw std::invalid_argument("dataset too small for requested split");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int attempt = 0; attempt < 100; ++attempt) {
    rng.shuffle(order);
    std::set<int> initial_classes;
    for (int i = 0; i < n_init; ++i) initial_classes.insert(dataset.labels[order[i]]);
    if (initial_classes.size() < 2) continue;
    Split split;
    split.initial.assign(order.begin(), order.begin() + n_init);
    split.pool.assign(order.begin() + n_init, order.begin() + n_init + n_pool);
    split.test.assign(order.begin() + n_init + n_pool, order.end());
    return split;
  }
  throw std::runtime_error("initial split single-class after 100 reshuffles");
}

Dataset standardize(const Dataset& dataset, StandardizeStats* stats_out) {
  const int n = dataset.size();
  if (n < 2) throw std::invalid_argument("standardize requires >= 2 instances");
  if (!dataset.features.allFinite())
    throw std::invalid_argument("standardize: non-finite feature value");

  StandardizeStats stats;
  stats.mean = dataset.features.colwise().mean();
  Eigen::MatrixXd centered = dataset.features.rowwise() - stats.mean.transpose();
  stats.stddev = (centered.array().square().colwise().sum() / n).sqrt();

  Dataset out = dataset;
  for (int j = 0; j < dataset.dim(); ++j) {
    if (stats.stddev[j] > 0) {
      out.features.col(j) = centered.col(j) / stats.stddev[j];
    } else {
      out.features.col(j).setZero();
    }
  }
  if (stats_out) *stats_out = stats;
  return out;
}

namespace {

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool parse_double(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = parse_csv_line(line);

  // An empty label column name loads a label-free feature matrix (used for
  // the recorded-responses path where labels travel in a separate file).
  int label_idx = -1;
  if (!label_column.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (header[j] == label_column) label_idx = static_cast<int>(j);
    if (label_idx < 0)
      throw std::runtime_error("label column '" + label_column + "' not found in " +
                               path);
  }

  std::vector<std::vector<std::string>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = parse_csv_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected " + std::to_string(header.size()) +
                               " cells, got " + std::to_string(cells.size()));
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw std::runtime_error("no data rows in " + path);

  const int n = static_cast<int>(rows.size());
  const int ncols = static_cast<int>(header.size());

  // A feature column is numeric iff every cell parses as a double.
  std::vector<bool> numeric(ncols, true);
  for (int j = 0; j < ncols; ++j) {
    if (j == label_idx) continue;
    double v;
    for (const auto& row : rows)
      if (!parse_double(row[j], &v)) {
        numeric[j] = false;
        break;
      }
  }

  // Category maps in sorted order, per categorical column.
  std::vector<std::vector<std::string>> categories(ncols);
  for (int j = 0; j < ncols; ++j) {
    if (j == label_idx || numeric[j]) continue;
    std::set<std::string> values;
    for (const auto& row : rows) values.insert(row[j]);
    categories[j].assign(values.begin(), values.end());
  }

  Dataset out;
  for (int j = 0; j < ncols; ++j) {
    if (j == label_idx) continue;
    if (numeric[j]) {
      out.feature_names.push_back(header[j]);
    } else {
      for (const auto& cat : categories[j])
        out.feature_names.push_back(header[j] + "=" + cat);
    }
  }

  if (label_idx >= 0) {
    std::set<std::string> label_values;
    for (const auto& row : rows) label_values.insert(row[label_idx]);
    out.class_names.assign(label_values.begin(), label_values.end());
    out.class_count = static_cast<int>(out.class_names.size());
  }

  const int d = static_cast<int>(out.feature_names.size());
  out.features = Eigen::MatrixXd::Zero(n, d);
  if (label_idx >= 0) out.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    int col = 0;
    for (int j = 0; j < ncols; ++j) {
      if (j == label_idx) continue;
      if (numeric[j]) {
        double v;
        if (!parse_double(rows[i][j], &v))
          throw std::runtime_error(path + ": unparseable cell in column " + header[j]);
        out.features(i, col++) = v;
      } else {
        const auto& cats = categories[j];
        const auto it = std::lower_bound(cats.begin(), cats.end(), rows[i][j]);
        out.features(i, col + static_cast<int>(it - cats.begin())) = 1.0;
        col += static_cast<int>(cats.size());
      }
    }
    if (label_idx >= 0) {
      const auto lit = std::lower_bound(out.class_names.begin(),
                                        out.class_names.end(), rows[i][label_idx]);
      out.labels[i] = static_cast<int>(lit - out.class_names.begin());
    }
  }
  return out;
}

void write_metadata(const Dataset& dataset, const StandardizeStats& stats,
                    const std::string& path) {
  nlohmann::json j;
  j["feature_names"] = dataset.feature_names;
  j["class_names"] = dataset.class_names;
  j["class_count"] = dataset.class_count;
  j["standardize_mean"] = std::vector<double>(stats.mean.data(),
                                              stats.mean.data() + stats.mean.size());
  j["standardize_stddev"] = std::vector<double>(
      stats.stddev.data(), stats.stddev.data() + stats.stddev.size());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write metadata file: " + path);
  out << j.dump(2) << "\n";
}

Dataset make_synthetic(int blob_count, int per_class, int dim, double separation,
                       Rng& rng) {
  if (blob_count < 2 || per_class < 1 || dim < 1)
    throw std::invalid_argument("make_synthetic: sizes must be positive, >= 2 blobs");

  // Centers on scaled axis directions: pairwise distance == separation.
  Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(blob_count, dim);
  const double scale = separation / std::sqrt(2.0);
  for (int b = 0; b < blob_count; ++b) centers(b, b % dim) = scale;

  const int n = blob_count * per_class;
  Dataset out;
  out.features.resize(n, dim);
  out.labels.resize(n);
  out.class_count = blob_count;
  for (int b = 0; b < blob_count; ++b) {
    out.class_names.push_back(std::to_string(b));
    for (int i = 0; i < per_class; ++i) {
      const int row = b * per_class + i;
      for (int j = 0; j < dim; ++j) out.features(row, j) = centers(b, j) + rng.normal();
      out.labels[row] = b;
    }
  }
  for (int j = 0; j < dim; ++j) out.feature_names.push_back("f" + std::to_string(j));
  return out;
}

}  // namespace cal
