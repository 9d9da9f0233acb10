#include "mcopt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>
#include <tuple>

#include "mcopt/errors.hpp"
#include "mcopt/rng.hpp"

namespace mcopt {

// Algorithms -------------------------------------------------------------------

AlgorithmSpec AlgorithmSpec::parse(std::string_view text) {
  AlgorithmSpec spec;
  spec.name = std::string(text);
  const auto colon = text.find(':');
  const auto meta = text.substr(0, colon);
  const auto component = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

  auto require_component = [&] {
    if (component.empty())
      throw DomainError("algorithm '" + spec.name + "' needs a component optimizer, e.g. " +
                        std::string(meta) + ":rbfopt");
    if (component == "bilal") {
      spec.component_by_target = true;
      spec.component = BboKind::BilalCostBO;
    } else {
      spec.component = parse_bbo_kind(component);
    }
  };
  auto forbid_component = [&] {
    if (!component.empty() || colon != std::string_view::npos)
      throw DomainError("algorithm '" + std::string(meta) + "' takes no component");
  };

  if (meta == "rs" || meta == "random") {
    forbid_component();
    spec.meta = MetaAlgorithm::RandomSearch;
    spec.component = BboKind::RandomSearch;
  } else if (meta == "exhaustive") {
    forbid_component();
    spec.meta = MetaAlgorithm::Exhaustive;
    spec.component = BboKind::Exhaustive;
  } else if (meta == "linear-pred") {
    forbid_component();
    spec.meta = MetaAlgorithm::LinearPredictor;
  } else if (meta == "flat") {
    spec.meta = MetaAlgorithm::Flattened;
    require_component();
  } else if (meta == "indep") {
    spec.meta = MetaAlgorithm::Independent;
    require_component();
  } else if (meta == "cb" || meta == "cloudbandit") {
    spec.meta = MetaAlgorithm::CloudBandit;
    require_component();
  } else {
    throw DomainError("unknown algorithm '" + spec.name + "'");
  }
  return spec;
}

BboKind AlgorithmSpec::component_for(Target target) const {
  if (component_by_target) return target == Target::Cost ? BboKind::BilalCostBO : BboKind::BilalTimeBO;
  return component;
}

MultiCloudResult run_algorithm(const AlgorithmSpec& algo, const ObjectiveTable& table, std::size_t workload,
                               Target target, std::size_t budget, std::uint64_t seed,
                               const RunSettings& settings) {
  const SearchSpace& space = table.space();
  if (workload >= table.workloads().size()) throw DomainError("workload index out of range");
  const Objective objective = [&table, workload, target](const ConfigPoint& p) {
    return table.lookup(workload, p, target);
  };
  const BboKind kind = algo.component_for(target);

  switch (algo.meta) {
    case MetaAlgorithm::RandomSearch:
      return flattened_optimize(space, objective, BboKind::RandomSearch, budget, seed, settings.bbo);
    case MetaAlgorithm::Exhaustive:
      return flattened_optimize(space, objective, BboKind::Exhaustive, space.total_points(), seed,
                                settings.bbo);
    case MetaAlgorithm::Flattened:
      return flattened_optimize(space, objective, kind, budget, seed, settings.bbo);
    case MetaAlgorithm::Independent:
      return independent_optimize(space, objective, kind, budget, seed, settings.bbo);
    case MetaAlgorithm::CloudBandit: {
      CloudBanditOptions opt;
      opt.eta = settings.eta;
      opt.b1 = cb_b1_for_budget(space.provider_count(), settings.eta, budget);
      opt.bbo = settings.bbo;
      return cloudbandit(space, objective, kind, opt, seed);
    }
    case MetaAlgorithm::LinearPredictor: {
      const LinearPrediction prediction = linear_predict_loo(table, workload, target);
      MultiCloudResult result;
      SearchTrace trace;
      for (std::size_t i = 0; i < space.total_points(); ++i) {
        const ConfigPoint p = space.point_at(i);
        trace.record(p, objective(p));
      }
      result.chosen_point = prediction.recommended().point;
      result.chosen_provider = result.chosen_point.provider;
      result.loss = objective(result.chosen_point);
      for (std::size_t k = 0; k < space.provider_count(); ++k) {
        ArmReport arm;
        arm.provider = k;
        arm.pulls = space.point_count(k);
        const auto offset = space.provider_offset(k);
        for (std::size_t i = 0; i < arm.pulls; ++i) {
          const double v = trace.entries()[offset + i].value;
          if (!arm.best_value || v < *arm.best_value) arm.best_value = v;
        }
        result.arms.push_back(arm);
      }
      result.total_evals = trace.size();
      result.search_expense = trace.expense();
      result.traces.push_back(std::move(trace));
      return result;
    }
  }
  throw DomainError("unsupported algorithm");
}

// Metrics ------------------------------------------------------------------------

TrueMinimum true_minimum(const ObjectiveTable& table, std::size_t workload, Target target) {
  const auto values = table.values(workload, target);
  const auto it = std::min_element(values.begin(), values.end());
  const auto idx = static_cast<std::size_t>(it - values.begin());
  return {table.space().point_at(idx), *it};
}

double regret(double found, double fstar) {
  if (!(fstar > 0.0)) throw DomainError("true minimum must be positive");
  if (found < fstar) throw IntegrityError("found value below the true minimum");
  return (found - fstar) / fstar;
}

double expected_min_with_replacement(std::vector<double> values, std::size_t draws) {
  if (values.empty()) throw DomainError("expected minimum of an empty set");
  if (draws < 1) throw DomainError("expected minimum needs at least one draw");
  std::sort(values.begin(), values.end());
  const auto M = static_cast<double>(values.size());
  const auto B = static_cast<double>(draws);
  double expected = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    // P(min = v_(i)) with 0-based i: ((M-i)/M)^B - ((M-i-1)/M)^B
    const double above = std::pow((M - static_cast<double>(i)) / M, B);
    const double strictly_above = std::pow((M - static_cast<double>(i) - 1.0) / M, B);
    expected += values[i] * (above - strictly_above);
  }
  return expected;
}

double expected_rs_regret(const ObjectiveTable& table, std::size_t workload, Target target, std::size_t budget) {
  const auto values = table.values(workload, target);
  const double fstar = *std::min_element(values.begin(), values.end());
  const double emin = expected_min_with_replacement(values, budget);
  // Rounding can push the weighted sum a hair below the minimum.
  return std::max(emin - fstar, 0.0) / fstar;
}

double savings(double search_expense, double run_expense, double random_expense, std::size_t production_runs) {
  if (!(random_expense > 0.0)) throw DomainError("random-configuration expense must be positive");
  if (production_runs < 1) throw DomainError("savings need at least one production run");
  const double n = static_cast<double>(production_runs);
  return (n * random_expense - (search_expense + n * run_expense)) / (n * random_expense);
}

// Plans ------------------------------------------------------------------------

void ExperimentPlan::validate() const {
  if (algorithms.empty()) throw DomainError("plan has no algorithms");
  if (targets.empty()) throw DomainError("plan has no targets");
  if (budgets.empty()) throw DomainError("plan budget grid is empty");
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    if (budgets[i] < 1) throw DomainError("budgets must be at least 1");
    if (i > 0 && budgets[i] <= budgets[i - 1]) throw DomainError("budget grid must be strictly ascending");
  }
  if (seeds < 1) throw DomainError("plan needs at least one seed");
  if (production_runs < 1) throw DomainError("production run count must be at least 1");
  if (jobs < 1) throw DomainError("job count must be at least 1");
}

std::uint64_t cell_seed(std::uint64_t plan_seed, std::string_view workload, std::string_view algorithm,
                        Target target, std::size_t budget, std::size_t repetition) {
  return derive_seed(plan_seed, {stable_hash(workload), stable_hash(algorithm),
                                 static_cast<std::uint64_t>(target), budget, repetition});
}

namespace {

struct Cell {
  std::size_t workload;
  std::size_t algorithm;
  Target target;
  std::size_t budget;
  std::size_t repetition;
};

struct CellOutcome {
  double found = 0.0;
  double search_expense = 0.0;
};

template <typename E>
bool rethrow_as(const std::exception& e, const std::string& context) {
  if (dynamic_cast<const E*>(&e) == nullptr) return false;
  throw E(context + ": " + e.what());
}

[[noreturn]] void rethrow_with_context(std::exception_ptr error, const std::string& context) {
  try {
    std::rethrow_exception(error);
  } catch (const std::exception& e) {
    rethrow_as<DomainError>(e, context) || rethrow_as<ParseError>(e, context) ||
        rethrow_as<CompletenessError>(e, context) || rethrow_as<DuplicateError>(e, context) ||
        rethrow_as<ValueError>(e, context) || rethrow_as<BudgetError>(e, context) ||
        rethrow_as<FitError>(e, context) || rethrow_as<NumericError>(e, context) ||
        rethrow_as<ProtocolError>(e, context) || rethrow_as<IntegrityError>(e, context) ||
        rethrow_as<ObjectiveError>(e, context);
    throw Error(context + ": " + e.what());
  }
}

}  // namespace

PlanResults run_plan(const ExperimentPlan& plan, const ObjectiveTable& table) {
  plan.validate();
  std::vector<std::size_t> workloads;
  if (plan.workloads.empty()) {
    workloads.resize(table.workloads().size());
    std::iota(workloads.begin(), workloads.end(), std::size_t{0});
  } else {
    for (const auto& w : plan.workloads) workloads.push_back(table.workload_index(w));
  }

  std::vector<Cell> cells;
  for (auto w : workloads)
    for (std::size_t a = 0; a < plan.algorithms.size(); ++a)
      for (auto t : plan.targets)
        for (auto b : plan.budgets)
          for (std::size_t r = 0; r < plan.seeds; ++r) cells.push_back({w, a, t, b, r});

  std::vector<CellOutcome> outcomes(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::size_t first_error_cell = cells.size();

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& c = cells[i];
      try {
        const auto& algo = plan.algorithms[c.algorithm];
        const std::uint64_t seed = cell_seed(plan.seed, table.workloads()[c.workload], algo.name, c.target,
                                             c.budget, c.repetition);
        const MultiCloudResult res =
            run_algorithm(algo, table, c.workload, c.target, c.budget, seed, plan.settings);
        outcomes[i] = {res.loss, res.search_expense};
      } catch (...) {
        std::lock_guard lock(error_mutex);
        // Keep the lowest failing cell so the reported error does not depend on scheduling.
        if (i < first_error_cell) {
          first_error_cell = i;
          first_error = std::current_exception();
        }
        failed.store(true);
      }
    }
  };

  const std::size_t jobs = std::min(plan.jobs, std::max<std::size_t>(cells.size(), 1));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (first_error) {
    const Cell& c = cells[first_error_cell];
    rethrow_with_context(first_error, "cell (workload=" + table.workloads()[c.workload] +
                                          ", algorithm=" + plan.algorithms[c.algorithm].name +
                                          ", target=" + std::string(to_string(c.target)) +
                                          ", budget=" + std::to_string(c.budget) +
                                          ", seed=" + std::to_string(c.repetition) + ")");
  }

  PlanResults results;
  results.regret.reserve(cells.size());
  std::map<std::size_t, double> fstar_cache[2];
  std::map<std::size_t, double> random_cache[2];
  auto fstar_of = [&](std::size_t w, Target t) {
    auto& cache = fstar_cache[static_cast<int>(t)];
    auto it = cache.find(w);
    if (it == cache.end()) it = cache.emplace(w, true_minimum(table, w, t).value).first;
    return it->second;
  };
  auto random_of = [&](std::size_t w, Target t) {
    auto& cache = random_cache[static_cast<int>(t)];
    auto it = cache.find(w);
    if (it == cache.end()) {
      const auto v = table.values(w, t);
      it = cache.emplace(w, std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size())).first;
    }
    return it->second;
  };

  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    const double fstar = fstar_of(c.workload, c.target);
    results.regret.push_back(RegretRecord{table.workloads()[c.workload], plan.algorithms[c.algorithm].name,
                                          c.target, c.budget, c.repetition, outcomes[i].found, fstar,
                                          regret(outcomes[i].found, fstar)});
  }

  // Cells of one (workload, algorithm, target, budget) are contiguous, repetitions innermost.
  for (std::size_t start = 0; start < cells.size(); start += plan.seeds) {
    const Cell& c = cells[start];
    double search = 0.0;
    double run = 0.0;
    for (std::size_t r = 0; r < plan.seeds; ++r) {
      search += outcomes[start + r].search_expense;
      run += outcomes[start + r].found;
    }
    const double n = static_cast<double>(plan.seeds);
    SavingsRecord rec;
    rec.workload = table.workloads()[c.workload];
    rec.algorithm = plan.algorithms[c.algorithm].name;
    rec.target = c.target;
    rec.budget = c.budget;
    rec.production_runs = plan.production_runs;
    rec.search_expense = search / n;
    rec.run_expense = run / n;
    rec.random_expense = random_of(c.workload, c.target);
    rec.savings = savings(rec.search_expense, rec.run_expense, rec.random_expense, plan.production_runs);
    results.savings.push_back(std::move(rec));
  }
  return results;
}

// Statistics -------------------------------------------------------------------

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw DomainError("box statistics need at least one value");
  std::sort(values.begin(), values.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  BoxStats s;
  s.median = quantile(0.5);
  s.q25 = quantile(0.25);
  s.q75 = quantile(0.75);
  const double iqr = s.q75 - s.q25;
  const double low_fence = s.q25 - 1.5 * iqr;
  const double high_fence = s.q75 + 1.5 * iqr;
  s.whisker_low = *std::find_if(values.begin(), values.end(), [&](double v) { return v >= low_fence; });
  s.whisker_high = *std::find_if(values.rbegin(), values.rend(), [&](double v) { return v <= high_fence; });
  return s;
}

std::vector<MeanRegretRow> mean_regret_table(const std::vector<RegretRecord>& records) {
  std::map<std::tuple<std::string, int, std::size_t>, std::vector<double>> groups;
  for (const auto& r : records) groups[{r.algorithm, static_cast<int>(r.target), r.budget}].push_back(r.regret);
  std::vector<MeanRegretRow> rows;
  for (auto& [key, values] : groups) {
    // Summing in sorted order makes the mean independent of record order.
    std::sort(values.begin(), values.end());
    const double sum = std::accumulate(values.begin(), values.end(), 0.0);
    rows.push_back({std::get<0>(key), static_cast<Target>(std::get<1>(key)), std::get<2>(key),
                    sum / static_cast<double>(values.size()), values.size()});
  }
  return rows;
}

std::vector<SavingsBoxRow> savings_box_table(const std::vector<SavingsRecord>& records) {
  std::map<std::tuple<std::string, int, std::size_t>, std::vector<double>> groups;
  for (const auto& r : records) groups[{r.algorithm, static_cast<int>(r.target), r.budget}].push_back(r.savings);
  std::vector<SavingsBoxRow> rows;
  for (auto& [key, values] : groups) {
    const std::size_t count = values.size();
    rows.push_back({std::get<0>(key), static_cast<Target>(std::get<1>(key)), std::get<2>(key),
                    box_stats(std::move(values)), count});
  }
  return rows;
}

}  // namespace mcopt
