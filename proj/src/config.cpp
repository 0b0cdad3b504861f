#include "cal/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace cal {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

std::string strip_quotes(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

struct RawValue {
  std::vector<std::string> tokens;
  bool is_list = false;
  int line = 0;
};

double to_double(const RawValue& v, const std::string& key) {
  if (v.is_list || v.tokens.size() != 1)
    throw ConfigError("field '" + key + "' expects a single number");
  try {
    std::size_t used = 0;
    const double d = std::stod(v.tokens[0], &used);
    if (used != v.tokens[0].size()) throw std::invalid_argument(v.tokens[0]);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("field '" + key + "': not a number: '" + v.tokens[0] + "'");
  }
}

// `auto` maps to the sentinel 0 (resolved at run time).
double to_double_or_auto(const RawValue& v, const std::string& key) {
  if (!v.is_list && v.tokens.size() == 1 && v.tokens[0] == "auto") return 0;
  return to_double(v, key);
}

long long to_int(const RawValue& v, const std::string& key) {
  const double d = to_double(v, key);
  if (d != std::floor(d))
    throw ConfigError("field '" + key + "' expects an integer");
  return static_cast<long long>(d);
}

bool to_bool(const RawValue& v, const std::string& key) {
  if (!v.is_list && v.tokens.size() == 1) {
    if (v.tokens[0] == "true") return true;
    if (v.tokens[0] == "false") return false;
  }
  throw ConfigError("field '" + key + "' expects true or false");
}

std::string to_string_value(const RawValue& v, const std::string& key) {
  if (v.is_list || v.tokens.size() != 1)
    throw ConfigError("field '" + key + "' expects a single value");
  return v.tokens[0];
}

std::vector<double> to_double_list(const RawValue& v, const std::string& key) {
  std::vector<double> out;
  for (const auto& tok : v.tokens) {
    RawValue one{{tok}, false, v.line};
    out.push_back(to_double(one, key));
  }
  return out;
}

std::vector<std::string> to_string_list(const RawValue& v) {
  return v.tokens;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);

  ExperimentConfig config;
  std::string section;
  std::string line;
  int lineno = 0;

  auto fail = [&](const std::string& msg) -> void {
    throw ConfigError(path + ":" + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail("expected key = value");

    RawValue raw;
    raw.line = lineno;
    if (value.front() == '[') {
      if (value.back() != ']') fail("unterminated list");
      raw.is_list = true;
      std::stringstream ss(value.substr(1, value.size() - 2));
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) raw.tokens.push_back(strip_quotes(item));
      }
    } else {
      raw.tokens.push_back(strip_quotes(value));
    }

    const std::string full = section.empty() ? key : section + "." + key;
    try {
      if (full == "data.source") config.source = to_string_value(raw, full);
      else if (full == "data.path") config.dataset_path = to_string_value(raw, full);
      else if (full == "data.responses") config.responses_path = to_string_value(raw, full);
      else if (full == "data.label_col") config.label_col = to_string_value(raw, full);
      else if (full == "data.cost_override") config.cost_override = to_double_list(raw, full);
      else if (full == "data.blobs") config.synth_blobs = static_cast<int>(to_int(raw, full));
      else if (full == "data.per_class") config.synth_per_class = static_cast<int>(to_int(raw, full));
      else if (full == "data.dim") config.synth_dim = static_cast<int>(to_int(raw, full));
      else if (full == "data.separation") config.synth_separation = to_double(raw, full);
      else if (full == "experiment.strategy") config.strategy = to_string_value(raw, full);
      else if (full == "experiment.strategies") config.strategies = to_string_list(raw);
      else if (full == "experiment.budget") config.budget = to_double(raw, full);
      else if (full == "experiment.runs") config.runs = static_cast<int>(to_int(raw, full));
      else if (full == "experiment.seed") config.seed = static_cast<std::uint64_t>(to_int(raw, full));
      else if (full == "experiment.max_queries") config.max_queries = to_int(raw, full);
      else if (full == "experiment.fractions") {
        const auto f = to_double_list(raw, full);
        if (f.size() != 3) throw ConfigError("fractions expects 3 entries");
        config.fractions = {f[0], f[1], f[2]};
      }
      else if (full == "classifier.lambda") config.lambda = to_double(raw, full);
      else if (full == "classifier.max_iters") config.max_iters = static_cast<int>(to_int(raw, full));
      else if (full == "classifier.tol") config.tol = to_double(raw, full);
      else if (full == "knn.k") config.knn_k = static_cast<int>(to_int(raw, full));
      else if (full == "knn.bandwidth") config.knn_bandwidth = to_double_or_auto(raw, full);
      else if (full == "simulation.clusters") config.sim.clusters = static_cast<int>(to_int(raw, full));
      else if (full == "simulation.costs") config.sim.costs = to_double_list(raw, full);
      else if (full == "simulation.p_expert") config.sim.p_expert = to_double_list(raw, full);
      else if (full == "simulation.p_nonexpert") config.sim.p_nonexpert = to_double_list(raw, full);
      else if (full == "simulation.expert_fraction") config.sim.expert_fraction = to_double_list(raw, full);
      else if (full == "agb.unit_budget") config.agb_unit_budget = to_double_or_auto(raw, full);
      else if (full == "agb.count_initial") config.agb_count_initial = to_bool(raw, full);
      else if (full == "experiment.seeds") { /* manifest echo; derived from seed+runs */ }
      else throw ConfigError("unknown key '" + full + "'");
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }

  validate_config(config);
  return config;
}

void validate_config(const ExperimentConfig& config) {
  if (config.source != "synthetic" && config.source != "csv" &&
      config.source != "recorded")
    throw ConfigError("field 'data.source': expected synthetic|csv|recorded, got '" +
                      config.source + "'");
  if ((config.source == "csv" || config.source == "recorded") &&
      config.dataset_path.empty())
    throw ConfigError("field 'data.path' is required for source " + config.source);
  if (config.source == "recorded" && config.responses_path.empty())
    throw ConfigError("field 'data.responses' is required for recorded source");

  try {
    parse_strategy(config.strategy);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("field 'experiment.strategy': ") + e.what());
  }
  for (const auto& name : config.strategies) {
    try {
      parse_strategy(name);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("field 'experiment.strategies': ") + e.what());
    }
  }

  if (config.budget < 0) throw ConfigError("field 'experiment.budget' must be >= 0");
  if (config.runs < 1) throw ConfigError("field 'experiment.runs' must be >= 1");
  double fraction_sum = 0;
  for (double f : config.fractions) {
    if (f <= 0) throw ConfigError("field 'experiment.fractions' entries must be positive");
    fraction_sum += f;
  }
  if (std::abs(fraction_sum - 1.0) > 1e-9)
    throw ConfigError("field 'experiment.fractions' must sum to 1");
  if (config.lambda < 0) throw ConfigError("field 'classifier.lambda' must be >= 0");
  if (config.max_iters < 1) throw ConfigError("field 'classifier.max_iters' must be >= 1");
  if (config.knn_k < 1) throw ConfigError("field 'knn.k' must be >= 1");
  if (config.knn_bandwidth < 0)
    throw ConfigError("field 'knn.bandwidth' must be positive or auto");

  const auto& sim = config.sim;
  if (config.source != "recorded") {
    if (sim.clusters < 1) throw ConfigError("field 'simulation.clusters' must be >= 1");
    const std::size_t m = sim.costs.size();
    if (m == 0) throw ConfigError("field 'simulation.costs' must be nonempty");
    if (sim.p_expert.size() != m || sim.p_nonexpert.size() != m ||
        sim.expert_fraction.size() != m)
      throw ConfigError("simulation lists (costs, p_expert, p_nonexpert, "
                        "expert_fraction) must have equal length");
    for (std::size_t i = 0; i < m; ++i) {
      if (sim.costs[i] <= 0)
        throw ConfigError("field 'simulation.costs' entries must be positive");
      if (!(sim.p_nonexpert[i] > 0.5) || sim.p_nonexpert[i] > sim.p_expert[i] ||
          sim.p_expert[i] > 1)
        throw ConfigError("simulation probabilities need 0.5 < p_nonexpert <= "
                          "p_expert <= 1");
      if (sim.expert_fraction[i] < 0 || sim.expert_fraction[i] > 1)
        throw ConfigError("field 'simulation.expert_fraction' entries must lie in [0,1]");
    }
  }
  if (config.agb_unit_budget < 0)
    throw ConfigError("field 'agb.unit_budget' must be positive or auto");
  if (config.max_queries < 0)
    throw ConfigError("field 'experiment.max_queries' must be >= 0");
}

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i]);
  }
  return out + "]";
}

}  // namespace

std::string manifest_text(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "# resolved run configuration\n";
  out << "[data]\n";
  out << "source = \"" << config.source << "\"\n";
  if (!config.dataset_path.empty()) out << "path = \"" << config.dataset_path << "\"\n";
  if (!config.responses_path.empty())
    out << "responses = \"" << config.responses_path << "\"\n";
  out << "label_col = \"" << config.label_col << "\"\n";
  if (!config.cost_override.empty())
    out << "cost_override = " << fmt_list(config.cost_override) << "\n";
  if (config.source == "synthetic") {
    out << "blobs = " << config.synth_blobs << "\n";
    out << "per_class = " << config.synth_per_class << "\n";
    out << "dim = " << config.synth_dim << "\n";
    out << "separation = " << fmt(config.synth_separation) << "\n";
  }
  out << "\n[experiment]\n";
  out << "strategy = \"" << config.strategy << "\"\n";
  if (!config.strategies.empty()) {
    out << "strategies = [";
    for (std::size_t i = 0; i < config.strategies.size(); ++i) {
      if (i) out << ", ";
      out << "\"" << config.strategies[i] << "\"";
    }
    out << "]\n";
  }
  out << "budget = " << fmt(config.budget) << "\n";
  out << "runs = " << config.runs << "\n";
  out << "seed = " << config.seed << "\n";
  out << "max_queries = " << config.max_queries << "\n";
  out << "fractions = " << fmt_list({config.fractions[0], config.fractions[1],
                                     config.fractions[2]}) << "\n";
  out << "seeds = [";
  for (int i = 0; i < config.runs; ++i) {
    if (i) out << ", ";
    out << config.seed + static_cast<std::uint64_t>(i);
  }
  out << "]\n";
  out << "\n[classifier]\n";
  out << "lambda = " << fmt(config.lambda) << "\n";
  out << "max_iters = " << config.max_iters << "\n";
  out << "tol = " << fmt(config.tol) << "\n";
  out << "\n[knn]\n";
  out << "k = " << config.knn_k << "\n";
  if (config.knn_bandwidth > 0)
    out << "bandwidth = " << fmt(config.knn_bandwidth) << "\n";
  else
    out << "bandwidth = auto\n";
  if (config.source != "recorded") {
    out << "\n[simulation]\n";
    out << "clusters = " << config.sim.clusters << "\n";
    out << "costs = " << fmt_list(config.sim.costs) << "\n";
    out << "p_expert = " << fmt_list(config.sim.p_expert) << "\n";
    out << "p_nonexpert = " << fmt_list(config.sim.p_nonexpert) << "\n";
    out << "expert_fraction = " << fmt_list(config.sim.expert_fraction) << "\n";
  }
  out << "\n[agb]\n";
  if (config.agb_unit_budget > 0)
    out << "unit_budget = " << fmt(config.agb_unit_budget) << "\n";
  else
    out << "unit_budget = auto\n";
  out << "count_initial = " << (config.agb_count_initial ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace cal
