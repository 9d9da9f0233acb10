#include "mcopt/multicloud.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "mcopt/errors.hpp"
#include "mcopt/rng.hpp"

namespace mcopt {

namespace {

BboOptions clamp_init(BboOptions options, std::size_t candidates) {
  options.init_design = std::min(options.init_design, candidates);
  return options;
}

void finish_totals(MultiCloudResult& result) {
  result.total_evals = 0;
  result.search_expense = 0.0;
  for (const auto& t : result.traces) {
    result.total_evals += t.size();
    result.search_expense += t.expense();
  }
}

ArmReport summarize(std::size_t provider, const SearchTrace& trace) {
  ArmReport arm;
  arm.provider = provider;
  arm.pulls = trace.size();
  if (!trace.empty()) arm.best_value = trace.best_value();
  return arm;
}

}  // namespace

std::string MultiCloudResult::to_json(const SearchSpace& space) const {
  nlohmann::ordered_json doc;
  doc["chosen_provider"] = space.provider(chosen_provider).name;
  doc["chosen_config"] = space.config_string(chosen_point);
  doc["chosen_nodes"] = chosen_point.nodes;
  doc["loss"] = loss;
  doc["total_evals"] = total_evals;
  doc["search_expense"] = search_expense;
  doc["arms"] = nlohmann::ordered_json::array();
  for (const auto& arm : arms) {
    nlohmann::ordered_json a;
    a["provider"] = space.provider(arm.provider).name;
    a["pulls"] = arm.pulls;
    a["best_value"] = arm.best_value ? nlohmann::ordered_json(*arm.best_value) : nullptr;
    a["eliminated_round"] = arm.eliminated_round ? nlohmann::ordered_json(*arm.eliminated_round) : nullptr;
    doc["arms"].push_back(std::move(a));
  }
  return doc.dump(2);
}

MultiCloudResult flattened_optimize(const SearchSpace& space, const Objective& objective, BboKind kind,
                                    std::size_t budget, std::uint64_t seed, const BboOptions& options) {
  const auto candidates = CandidateSet::flattened(space);
  MultiCloudResult result;
  result.traces.push_back(
      run_bbo(kind, candidates, objective, budget, seed, clamp_init(options, candidates.size())));
  const SearchTrace& trace = result.traces.front();
  result.chosen_point = trace.best_point();
  result.chosen_provider = result.chosen_point.provider;
  result.loss = trace.best_value();

  for (std::size_t k = 0; k < space.provider_count(); ++k) {
    ArmReport arm;
    arm.provider = k;
    for (const auto& e : trace.entries()) {
      if (e.point.provider != k) continue;
      ++arm.pulls;
      if (!arm.best_value || e.value < *arm.best_value) arm.best_value = e.value;
    }
    result.arms.push_back(arm);
  }
  finish_totals(result);
  return result;
}

std::vector<std::size_t> split_budget(std::size_t budget, std::size_t providers) {
  if (providers == 0) throw DomainError("no providers to split the budget over");
  if (budget < providers)
    throw BudgetError("budget " + std::to_string(budget) + " is smaller than the " +
                      std::to_string(providers) + " providers");
  std::vector<std::size_t> budgets(providers, budget / providers);
  for (std::size_t k = 0; k < budget % providers; ++k) ++budgets[k];
  return budgets;
}

MultiCloudResult independent_optimize(const SearchSpace& space, const Objective& objective, BboKind kind,
                                      std::size_t budget, std::uint64_t seed, const BboOptions& options) {
  const std::size_t K = space.provider_count();
  const auto budgets = split_budget(budget, K);
  MultiCloudResult result;
  std::optional<std::size_t> winner;
  for (std::size_t k = 0; k < K; ++k) {
    const auto candidates = CandidateSet::for_provider(space, k);
    const std::uint64_t arm_seed = K == 1 ? seed : derive_seed(seed, {k});
    result.traces.push_back(run_bbo(kind, candidates, objective, budgets[k], arm_seed,
                                    clamp_init(options, candidates.size())));
    const SearchTrace& trace = result.traces.back();
    ArmReport arm = summarize(k, trace);
    arm.saturated = samples_without_replacement(kind) && trace.size() == candidates.size();
    result.arms.push_back(arm);
    if (!winner || trace.best_value() < result.traces[*winner].best_value()) winner = k;
  }
  result.chosen_provider = *winner;
  result.chosen_point = result.traces[*winner].best_point();
  result.loss = result.traces[*winner].best_value();
  finish_totals(result);
  return result;
}

std::size_t cb_round_budget(std::size_t b1, double eta, std::size_t round) {
  if (round < 1) throw DomainError("CloudBandit rounds are 1-based");
  const double raw = static_cast<double>(b1) * std::pow(eta, static_cast<double>(round - 1));
  // The epsilon absorbs pow() rounding for integral growth factors.
  return static_cast<std::size_t>(std::floor(raw + 1e-9));
}

std::size_t cb_total_budget(std::size_t providers, std::size_t b1, double eta) {
  if (providers < 1) throw DomainError("CloudBandit needs at least one provider");
  if (b1 < 1) throw DomainError("CloudBandit initial budget must be at least 1");
  if (!(eta > 1.0) || !std::isfinite(eta)) throw DomainError("CloudBandit growth factor must exceed 1");
  std::size_t total = 0;
  for (std::size_t m = 1; m <= providers; ++m) total += (providers - m + 1) * cb_round_budget(b1, eta, m);
  return total;
}

std::size_t cb_b1_for_budget(std::size_t providers, double eta, std::size_t budget) {
  const std::size_t minimum = cb_total_budget(providers, 1, eta);
  if (budget < minimum)
    throw BudgetError("budget " + std::to_string(budget) + " is below the CloudBandit minimum of " +
                      std::to_string(minimum) + " (b1 = 1)");
  // Total budget is non-decreasing in b1; bracket then bisect.
  std::size_t lo = 1;
  std::size_t hi = 2;
  while (cb_total_budget(providers, hi, eta) <= budget) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (cb_total_budget(providers, mid, eta) <= budget) lo = mid;
    else hi = mid;
  }
  return lo;
}

MultiCloudResult cloudbandit(const SearchSpace& space, const Objective& objective, BboKind kind,
                             const CloudBanditOptions& options, std::uint64_t seed) {
  const std::size_t K = space.provider_count();
  cb_total_budget(K, options.b1, options.eta);  // validates b1 and eta

  struct Arm {
    std::size_t provider;
    Optimizer optimizer;
    bool active = true;
    bool saturated = false;
    std::optional<std::size_t> eliminated_round;
  };
  std::vector<Arm> arms;
  arms.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    auto candidates = CandidateSet::for_provider(space, k);
    const auto bbo = clamp_init(options.bbo, candidates.size());
    arms.push_back(Arm{k, Optimizer(kind, std::move(candidates), derive_seed(seed, {k}), bbo), true, false, std::nullopt});
  }

  for (std::size_t round = 1; round <= K; ++round) {
    const std::size_t pulls = cb_round_budget(options.b1, options.eta, round);
    for (auto& arm : arms) {
      if (!arm.active) continue;
      for (std::size_t i = 0; i < pulls && !arm.saturated; ++i) {
        const auto point = arm.optimizer.suggest();
        if (!point) {
          arm.saturated = true;
          break;
        }
        double value = 0.0;
        try {
          value = objective(*point);
        } catch (const std::exception& e) {
          throw ObjectiveError("objective failed in round " + std::to_string(round) + " for " +
                               space.point_string(*point) + ": " + e.what());
        }
        arm.optimizer.observe(*point, value);
      }
      if (arm.optimizer.saturated()) arm.saturated = true;
    }
    if (round == K) break;

    Arm* worst = nullptr;
    for (auto& arm : arms) {
      if (!arm.active) continue;
      if (worst == nullptr) {
        worst = &arm;
        continue;
      }
      const double loss = arm.optimizer.trace().best_value();
      const double worst_loss = worst->optimizer.trace().best_value();
      // Arms are visited in provider order, so >= hands ties to the later provider
      // unless the incumbent is saturated and the challenger is not.
      if (loss > worst_loss || (loss == worst_loss && (arm.saturated || !worst->saturated)))
        worst = &arm;
    }
    worst->active = false;
    worst->eliminated_round = round;
  }

  MultiCloudResult result;
  for (const auto& arm : arms) {
    result.traces.push_back(arm.optimizer.trace());
    ArmReport report = summarize(arm.provider, arm.optimizer.trace());
    report.eliminated_round = arm.eliminated_round;
    report.saturated = arm.saturated;
    result.arms.push_back(report);
    if (arm.active) {
      result.chosen_provider = arm.provider;
      result.chosen_point = arm.optimizer.trace().best_point();
      result.loss = arm.optimizer.trace().best_value();
    }
  }
  finish_totals(result);
  return result;
}

}  // namespace mcopt
