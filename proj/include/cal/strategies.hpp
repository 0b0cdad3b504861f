#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "cal/rng.hpp"

namespace cal {

enum class Strategy { Gb, Agb, Ceal, Alc, All, Random };

Strategy parse_strategy(const std::string& name);  // gb|agb|ceal|alc|all|random
std::string strategy_name(Strategy strategy);

// Running cumulative accuracy estimate maintained by the adaptive criterion.
struct AgbState {
  double rho0 = 1.0;
  long long n0 = 0;
};

// Labeling-accuracy-per-cost ratio.
double ceal_score(double rho, double cost);

// Cost-normalized generalization benefit, (2*rho - 1) / sqrt(cost).
double gb_score(double rho, double cost);

// Adaptive variant: fold the labeler's purchasable sample count m = floor(b/c)
// into the running accuracy, score (2*cum - 1) * sqrt(n0 + m).
double agb_score(const AgbState& state, double rho, double cost, double unit_budget);

// Instance usefulness times labeler score.
double effectiveness(double uncertainty, double labeler_score);

AgbState update_agb(const AgbState& state, double chosen_rho);

// Modal class; ties broken uniformly at random.
int majority_vote(const std::vector<int>& labels, Rng& rng);

// Everything a selection criterion may look at for one iteration.
struct SelectionContext {
  std::vector<int> pool_ids;          // instance ids, ascending
  Eigen::VectorXd uncertainty;        // r(x_j) per pool position
  Eigen::MatrixXd accuracy_estimate;  // labelers x pool positions
  std::vector<double> costs;          // per labeler
  double remaining_budget = 0;
};

struct Choice {
  int instance_id = -1;
  int pool_position = -1;
  int labeler_id = -1;     // -1 when majority_all
  bool majority_all = false;
  double cost = 0;
  double score = 0;
};

// One affordable (instance, labeler/vote) choice per the named criterion, or
// nullopt once nothing is affordable. Ties break by (lower cost, lower
// labeler id, lower instance id). AGB skips labelers with cost > unit budget.
std::optional<Choice> select(Strategy strategy, const SelectionContext& ctx,
                             const AgbState& agb_state, double agb_unit_budget,
                             Rng& rng);

}  // namespace cal
