#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcopt/bbo.hpp"
#include "mcopt/dataset.hpp"
#include "mcopt/space.hpp"

namespace mcopt {

/// Per-provider summary of a meta-algorithm run.
struct ArmReport {
  std::size_t provider = 0;
  std::size_t pulls = 0;
  std::optional<double> best_value;
  /// 1-based round in which CloudBandit dropped the arm; empty for survivors and
  /// for algorithms without elimination.
  std::optional<std::size_t> eliminated_round;
  bool saturated = false;
};

struct MultiCloudResult {
  std::size_t chosen_provider = 0;
  ConfigPoint chosen_point;
  double loss = 0.0;
  std::vector<ArmReport> arms;
  /// One trace for the flattened adaptation, one per provider otherwise.
  std::vector<SearchTrace> traces;
  std::size_t total_evals = 0;
  /// Sum of the target metric over every evaluation of every trace.
  double search_expense = 0.0;

  /// `{chosen_provider, chosen_config, chosen_nodes, loss, total_evals,
  ///   search_expense, arms: [{provider, pulls, best_value, eliminated_round}]}`
  std::string to_json(const SearchSpace& space) const;
};

/// One optimizer over every provider's points at once.
MultiCloudResult flattened_optimize(const SearchSpace& space, const Objective& objective, BboKind kind,
                                    std::size_t budget, std::uint64_t seed, const BboOptions& options = {});

/// Per-provider budgets for the independent adaptation: floor(B/K) each, the
/// remainder going one apiece to the earliest providers. Throws BudgetError when B < K.
std::vector<std::size_t> split_budget(std::size_t budget, std::size_t providers);

/// K independent optimizers with split_budget(); the winner has the lowest best
/// loss, ties going to the earlier provider.
MultiCloudResult independent_optimize(const SearchSpace& space, const Objective& objective, BboKind kind,
                                      std::size_t budget, std::uint64_t seed, const BboOptions& options = {});

/// Pulls per active arm in round m (1-based): floor(b1 * eta^(m-1)).
std::size_t cb_round_budget(std::size_t b1, double eta, std::size_t round);
/// sum_{m=1..K} (K - m + 1) * cb_round_budget(b1, eta, m)
std::size_t cb_total_budget(std::size_t providers, std::size_t b1, double eta);
/// Largest b1 whose total budget does not exceed `budget`; BudgetError if even b1 = 1 overspends.
std::size_t cb_b1_for_budget(std::size_t providers, double eta, std::size_t budget);

struct CloudBanditOptions {
  std::size_t b1 = 1;
  double eta = 2.0;
  BboOptions bbo;
};

/// Successive elimination over providers. Every round advances each active arm's
/// own optimizer by that round's budget, then drops the arm with the highest best
/// loss (saturated arms first on ties, then the later provider). K rounds, K - 1
/// eliminations; the survivor's best point is returned.
MultiCloudResult cloudbandit(const SearchSpace& space, const Objective& objective, BboKind kind,
                             const CloudBanditOptions& options, std::uint64_t seed);

/// Entry of a linear-predictor ranking.
struct PredictedPoint {
  ConfigPoint point;
  double predicted = 0.0;
  /// True when the cell's least-squares design was rank deficient and the mean of
  /// the training values was used instead.
  bool fallback = false;
};

struct LinearPrediction {
  /// Every point, ascending by predicted value (canonical order on ties).
  std::vector<PredictedPoint> ranking;
  const PredictedPoint& recommended() const { return ranking.front(); }
  std::size_t fallback_count() const;
};

/// Leave-one-out runtime/cost predictor over cluster sizes with features
/// [1, 1/n, log n, n], fitted per (provider, configuration).
LinearPrediction linear_predict_loo(const ObjectiveTable& table, std::size_t workload, Target target);

}  // namespace mcopt
