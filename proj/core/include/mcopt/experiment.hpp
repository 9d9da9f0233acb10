#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcopt/bbo.hpp"
#include "mcopt/dataset.hpp"
#include "mcopt/multicloud.hpp"

namespace mcopt {

enum class MetaAlgorithm { RandomSearch, Exhaustive, Flattened, Independent, CloudBandit, LinearPredictor };

/// An entry of the algorithm matrix, written `meta[:component]`:
/// `rs`, `exhaustive`, `linear-pred`, `flat:<bbo>`, `indep:<bbo>`, `cb:<bbo>`.
/// The component `bilal` resolves to bilal-cost or bilal-time by target.
struct AlgorithmSpec {
  MetaAlgorithm meta = MetaAlgorithm::RandomSearch;
  BboKind component = BboKind::RandomSearch;
  bool component_by_target = false;
  std::string name;

  static AlgorithmSpec parse(std::string_view text);
  BboKind component_for(Target target) const;
};

struct RunSettings {
  double eta = 2.0;
  BboOptions bbo;
};

/// Runs one algorithm on one (workload, target) with search budget B.
/// `exhaustive` scans every point regardless of B; CloudBandit derives b1 from B;
/// `linear-pred` evaluates every point online and ignores B.
MultiCloudResult run_algorithm(const AlgorithmSpec& algo, const ObjectiveTable& table, std::size_t workload,
                               Target target, std::size_t budget, std::uint64_t seed,
                               const RunSettings& settings = {});

struct TrueMinimum {
  ConfigPoint point;
  double value = 0.0;
};

/// Exhaustive scan; the first point in canonical order wins ties.
TrueMinimum true_minimum(const ObjectiveTable& table, std::size_t workload, Target target);

/// (found - fstar) / fstar; IntegrityError when found < fstar, DomainError when fstar <= 0.
double regret(double found, double fstar);

/// Exact E[min] of `draws` uniform draws with replacement from `values`.
double expected_min_with_replacement(std::vector<double> values, std::size_t draws);
/// Exact expected regret of Random Search with budget B over all table points.
double expected_rs_regret(const ObjectiveTable& table, std::size_t workload, Target target, std::size_t budget);

/// (N * R_rand - (C_opt + N * R_opt)) / (N * R_rand)
double savings(double search_expense, double run_expense, double random_expense, std::size_t production_runs);

struct ExperimentPlan {
  std::vector<AlgorithmSpec> algorithms;
  std::vector<Target> targets{Target::Cost, Target::Time};
  std::vector<std::size_t> budgets{11, 22, 33, 44, 55, 66, 77, 88};
  std::size_t seeds = 50;
  std::size_t production_runs = 64;
  std::uint64_t seed = 0;
  /// Empty means every workload in the table.
  std::vector<std::string> workloads;
  RunSettings settings;
  std::size_t jobs = 1;

  /// Throws DomainError on empty/unsorted budgets, zero seeds or no algorithms.
  void validate() const;
};

struct RegretRecord {
  std::string workload;
  std::string algorithm;
  Target target = Target::Cost;
  std::size_t budget = 0;
  std::size_t seed = 0;  // repetition index
  double found = 0.0;
  double fstar = 0.0;
  double regret = 0.0;
};

/// Seed-averaged savings of one (workload, algorithm, target, budget) cell.
struct SavingsRecord {
  std::string workload;
  std::string algorithm;
  Target target = Target::Cost;
  std::size_t budget = 0;
  std::size_t production_runs = 0;
  double search_expense = 0.0;  // C_opt
  double run_expense = 0.0;     // R_opt
  double random_expense = 0.0;  // R_rand
  double savings = 0.0;         // S
};

struct PlanResults {
  std::vector<RegretRecord> regret;
  std::vector<SavingsRecord> savings;
};

/// Executes every (workload, algorithm, target, budget, repetition) cell. Cell
/// seeds are a stable hash of the plan seed and the cell coordinates, so results
/// do not depend on `jobs` or scheduling.
PlanResults run_plan(const ExperimentPlan& plan, const ObjectiveTable& table);

/// Per-cell seed used by run_plan.
std::uint64_t cell_seed(std::uint64_t plan_seed, std::string_view workload, std::string_view algorithm,
                        Target target, std::size_t budget, std::size_t repetition);

struct BoxStats {
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
};

/// Quartiles by linear interpolation between order statistics; whiskers at the
/// furthest data within 1.5 IQR of the box.
BoxStats box_stats(std::vector<double> values);

struct MeanRegretRow {
  std::string algorithm;
  Target target = Target::Cost;
  std::size_t budget = 0;
  double mean_regret = 0.0;
  std::size_t count = 0;
};

struct SavingsBoxRow {
  std::string algorithm;
  Target target = Target::Cost;
  std::size_t budget = 0;
  BoxStats stats;
  std::size_t count = 0;
};

/// Mean regret grouped by (algorithm, target, budget), sorted by key.
std::vector<MeanRegretRow> mean_regret_table(const std::vector<RegretRecord>& records);
/// Savings box statistics across workloads grouped by (algorithm, target, budget), sorted by key.
std::vector<SavingsBoxRow> savings_box_table(const std::vector<SavingsRecord>& records);

}  // namespace mcopt
