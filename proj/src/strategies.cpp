#include "cal/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cal {

Strategy parse_strategy(const std::string& name) {
  if (name == "gb") return Strategy::Gb;
  if (name == "agb") return Strategy::Agb;
  if (name == "ceal") return Strategy::Ceal;
  if (name == "alc") return Strategy::Alc;
  if (name == "all") return Strategy::All;
  if (name == "random") return Strategy::Random;
  throw std::invalid_argument("unknown strategy '" + name +
                              "' (expected gb|agb|ceal|alc|all|random)");
}

std::string strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::Gb: return "gb";
    case Strategy::Agb: return "agb";
    case Strategy::Ceal: return "ceal";
    case Strategy::Alc: return "alc";
    case Strategy::All: return "all";
    case Strategy::Random: return "random";
  }
  throw std::logic_error("unreachable");
}

double ceal_score(double rho, double cost) {
  if (cost <= 0) throw std::invalid_argument("ceal_score: cost must be positive");
  return rho / cost;
}

double gb_score(double rho, double cost) {
  if (cost <= 0) throw std::invalid_argument("gb_score: cost must be positive");
  return (2.0 * rho - 1.0) / std::sqrt(cost);
}

double agb_score(const AgbState& state, double rho, double cost, double unit_budget) {
  if (cost <= 0) throw std::invalid_argument("agb_score: cost must be positive");
  if (unit_budget < cost)
    throw std::invalid_argument("agb_score: labeler unpurchasable under unit budget");
  const double m = std::floor(unit_budget / cost);
  const double n = static_cast<double>(state.n0);
  const double cumulative = (state.rho0 * n + rho * m) / (n + m);
  return (2.0 * cumulative - 1.0) * std::sqrt(n + m);
}

double effectiveness(double uncertainty, double labeler_score) {
  return uncertainty * labeler_score;
}

AgbState update_agb(const AgbState& state, double chosen_rho) {
  const double n = static_cast<double>(state.n0);
  return {(state.rho0 * n + chosen_rho) / (n + 1.0), state.n0 + 1};
}

int majority_vote(const std::vector<int>& labels, Rng& rng) {
  if (labels.empty()) throw std::invalid_argument("majority_vote: empty label list");
  const int max_class = *std::max_element(labels.begin(), labels.end());
  std::vector<int> counts(max_class + 1, 0);
  for (int y : labels) ++counts[y];
  const int top = *std::max_element(counts.begin(), counts.end());
  std::vector<int> modes;
  for (int c = 0; c <= max_class; ++c)
    if (counts[c] == top) modes.push_back(c);
  return modes[rng.uniform_index(modes.size())];
}

namespace {

void validate(const SelectionContext& ctx) {
  if (ctx.pool_ids.empty()) throw std::invalid_argument("select: empty pool");
  const int pool = static_cast<int>(ctx.pool_ids.size());
  if (ctx.uncertainty.size() != pool ||
      ctx.accuracy_estimate.cols() != pool ||
      ctx.accuracy_estimate.rows() != static_cast<int>(ctx.costs.size()))
    throw std::invalid_argument("select: context shape mismatch");
  if (ctx.remaining_budget < 0)
    throw std::invalid_argument("select: negative remaining budget");
}

// Candidate ordering: higher score wins; exact ties break by lower cost,
// then lower labeler id, then lower instance id.
bool better(double score, double cost, int labeler, int instance, const Choice& best) {
  if (score != best.score) return score > best.score;
  if (cost != best.cost) return cost < best.cost;
  if (labeler != best.labeler_id) return labeler < best.labeler_id;
  return instance < best.instance_id;
}

// Position of the most uncertain pool instance (ties: lower instance id).
int most_uncertain(const SelectionContext& ctx) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(ctx.pool_ids.size()); ++j)
    if (ctx.uncertainty[j] > ctx.uncertainty[best]) best = j;
  return best;
}

}  // namespace

std::optional<Choice> select(Strategy strategy, const SelectionContext& ctx,
                             const AgbState& agb_state, double agb_unit_budget,
                             Rng& rng) {
  validate(ctx);
  const int pool = static_cast<int>(ctx.pool_ids.size());
  const int labelers = static_cast<int>(ctx.costs.size());

  switch (strategy) {
    case Strategy::Gb:
    case Strategy::Agb:
    case Strategy::Ceal: {
      std::optional<Choice> best;
      for (int j = 0; j < pool; ++j) {
        for (int li = 0; li < labelers; ++li) {
          const double cost = ctx.costs[li];
          if (cost > ctx.remaining_budget) continue;
          if (strategy == Strategy::Agb && cost > agb_unit_budget) continue;
          const double rho = ctx.accuracy_estimate(li, j);
          double q;
          switch (strategy) {
            case Strategy::Gb: q = gb_score(rho, cost); break;
            case Strategy::Agb: q = agb_score(agb_state, rho, cost, agb_unit_budget); break;
            default: q = ceal_score(rho, cost); break;
          }
          const double score = effectiveness(ctx.uncertainty[j], q);
          if (!best || better(score, cost, li, ctx.pool_ids[j], *best))
            best = Choice{ctx.pool_ids[j], j, li, false, cost, score};
        }
      }
      return best;
    }

    case Strategy::Alc: {
      const int j = most_uncertain(ctx);
      std::optional<Choice> best;
      for (int li = 0; li < labelers; ++li) {
        const double cost = ctx.costs[li];
        if (cost > ctx.remaining_budget) continue;
        const double score = ctx.accuracy_estimate(li, j);
        if (!best || better(score, cost, li, ctx.pool_ids[j], *best))
          best = Choice{ctx.pool_ids[j], j, li, false, cost, score};
      }
      return best;
    }

    case Strategy::All: {
      double total = 0;
      for (double c : ctx.costs) total += c;
      if (total > ctx.remaining_budget || labelers == 0) return std::nullopt;
      const int j = most_uncertain(ctx);
      return Choice{ctx.pool_ids[j], j, -1, true, total, ctx.uncertainty[j]};
    }

    case Strategy::Random: {
      std::vector<int> affordable;
      for (int li = 0; li < labelers; ++li)
        if (ctx.costs[li] <= ctx.remaining_budget) affordable.push_back(li);
      if (affordable.empty()) return std::nullopt;
      const int j = most_uncertain(ctx);
      const int li = affordable[rng.uniform_index(affordable.size())];
      return Choice{ctx.pool_ids[j], j, li, false, ctx.costs[li], ctx.uncertainty[j]};
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace cal
