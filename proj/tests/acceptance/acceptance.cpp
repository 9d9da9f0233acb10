// Acceptance gate: runs each criterion, prints one PASS/FAIL line per criterion
// and exits nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "mcopt/csv.hpp"
#include "mcopt/mcopt.hpp"
#include "test_support.hpp"

using namespace mcopt;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

Objective table_objective(const ObjectiveTable& table, std::size_t w, Target t) {
  return [&table, w, t](const ConfigPoint& p) { return table.lookup(w, p, t); };
}

Outcome budget_arithmetic() {
  Outcome o;
  for (std::size_t b1 = 1; b1 <= 8; ++b1) {
    const auto total = cb_total_budget(3, b1, 2.0);
    if (total != 11 * b1) {
      o.pass = false;
      o.detail = "b1=" + std::to_string(b1) + " gives " + std::to_string(total);
    }
  }
  if (o.pass) o.detail = "B = 11..88 for b1 = 1..8";
  return o;
}

Outcome exhaustive_optimality() {
  const auto space = SearchSpace::reference();
  std::size_t checked = 0;
  for (std::uint64_t table_seed = 0; table_seed < 20; ++table_seed) {
    const auto data = generate_synthetic(space, 3, 1000 + table_seed, Scenario::neutral());
    for (std::size_t w = 0; w < 3; ++w)
      for (Target t : {Target::Time, Target::Cost}) {
        const auto r = flattened_optimize(space, table_objective(data.table, w, t), BboKind::Exhaustive, 88, 1);
        const double fstar = true_minimum(data.table, w, t).value;
        if (regret(r.loss, fstar) != 0.0)
          return {false, "nonzero regret on table " + std::to_string(table_seed)};
        ++checked;
      }
  }
  return {true, std::to_string(checked) + " workload/target pairs with regret 0"};
}

Outcome random_search_oracle() {
  const auto space = SearchSpace::reference();
  const auto rs = AlgorithmSpec::parse("rs");
  const std::size_t runs = 2000;
  std::size_t comparisons = 0;
  double worst = 0.0;
  for (std::uint64_t table_seed = 0; table_seed < 5; ++table_seed) {
    const auto data = generate_synthetic(space, 3, 2000 + table_seed, Scenario::neutral());
    const std::size_t cells = data.table.workloads().size() * 2;
    for (std::size_t B : {1u, 5u, 11u, 33u}) {
      // Statistic per seed: regret averaged over the table's workloads and targets.
      double oracle = 0.0;
      for (std::size_t w = 0; w < data.table.workloads().size(); ++w)
        for (Target t : {Target::Time, Target::Cost}) oracle += expected_rs_regret(data.table, w, t, B);
      oracle /= static_cast<double>(cells);

      double sum = 0.0;
      double sum_sq = 0.0;
      for (std::size_t s = 0; s < runs; ++s) {
        double stat = 0.0;
        for (std::size_t w = 0; w < data.table.workloads().size(); ++w)
          for (Target t : {Target::Time, Target::Cost}) {
            const auto r = run_algorithm(rs, data.table, w, t, B, derive_seed(table_seed, {B, s, w}) + (t == Target::Cost));
            stat += regret(r.loss, true_minimum(data.table, w, t).value);
          }
        stat /= static_cast<double>(cells);
        sum += stat;
        sum_sq += stat * stat;
      }
      const double mean = sum / runs;
      const double se = std::sqrt(std::max(sum_sq / runs - mean * mean, 0.0) / runs);
      const double z = se > 0 ? std::abs(mean - oracle) / se : (mean == oracle ? 0.0 : 1e9);
      worst = std::max(worst, z);
      ++comparisons;
      if (z > 3.0) {
        std::ostringstream msg;
        msg << "table " << table_seed << " B=" << B << ": MC " << mean << " vs oracle " << oracle << " (" << z
            << " SE)";
        return {false, msg.str()};
      }
    }
  }
  std::ostringstream msg;
  msg << comparisons << " comparisons, max deviation " << worst << " SE";
  return {true, msg.str()};
}

struct DominantRuns {
  std::size_t recovered = 0;
  std::size_t wrong_total = 0;
  std::size_t dominance_violations = 0;
};

std::map<std::string, DominantRuns> dominant_runs() {
  static std::map<std::string, DominantRuns> cache;
  if (!cache.empty()) return cache;
  const auto space = SearchSpace::reference();
  for (BboKind kind : {BboKind::RbfOpt, BboKind::CherryPickBO}) {
    DominantRuns& runs = cache[std::string(to_string(kind))];
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const std::size_t k = seed % 3;
      const Target target = seed % 2 == 0 ? Target::Cost : Target::Time;
      const auto data = generate_synthetic(space, 1, 3000 + seed, Scenario::dominant(k, 0.1));
      const auto r = cloudbandit(space, table_objective(data.table, 0, target), kind, {1, 2.0, {}}, seed);
      if (r.chosen_provider == k) ++runs.recovered;
      if (r.total_evals != 11) ++runs.wrong_total;
      for (const auto& arm : r.arms)
        if (arm.eliminated_round && arm.pulls > r.arms[r.chosen_provider].pulls) ++runs.dominance_violations;
    }
  }
  return cache;
}

Outcome planted_provider() {
  Outcome o;
  std::ostringstream msg;
  for (const auto& [name, runs] : dominant_runs()) {
    msg << name << " " << runs.recovered << "/100 recovered, " << (100 - runs.wrong_total) << "/100 used 11 evals. ";
    if (runs.recovered < 95 || runs.wrong_total != 0) o.pass = false;
  }
  o.detail = msg.str();
  return o;
}

Outcome budget_dominance() {
  Outcome o;
  std::ostringstream msg;
  for (const auto& [name, runs] : dominant_runs()) {
    msg << name << " violations " << runs.dominance_violations << ". ";
    if (runs.dominance_violations != 0) o.pass = false;
  }
  o.detail = msg.str();
  return o;
}

Outcome gp_correctness() {
  // Fits on random subsets of encoded candidates with synthetic runtimes/costs,
  // i.e. the inputs the optimizers hand to the GP.
  const auto space = SearchSpace::reference();
  Rng rng(6);
  double worst = 0.0;
  for (int fit = 0; fit < 100; ++fit) {
    const auto data = generate_synthetic(space, 1, 6000 + static_cast<std::uint64_t>(fit), Scenario::neutral());
    const auto candidates =
        fit % 2 == 0 ? CandidateSet::flattened(space) : CandidateSet::for_provider(space, rng.index(3));
    const Target target = fit % 4 < 2 ? Target::Time : Target::Cost;
    const std::size_t n = 1 + rng.index(candidates.size());
    std::vector<EncodedPoint> X;
    std::vector<double> y;
    for (auto i : rng.sample_without_replacement(candidates.size(), n)) {
      X.push_back(candidates.encoding(i));
      y.push_back(data.table.lookup(0, candidates.point(i), target));
    }
    const auto gp = GpModel::fit(X, y);
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(gp.predict(X[i]).mean - y[i]));
  }
  if (worst > 1e-4) return {false, "training-point error " + std::to_string(worst)};

  for (int i = 0; i < 10000; ++i) {
    const double mean = rng.uniform(-50, 50);
    const double std = rng.uniform() < 0.05 ? 0.0 : rng.uniform(0, 20);
    const double best = rng.uniform(-50, 50);
    const double ei = expected_improvement(mean, std, best);
    const double pi = probability_of_improvement(mean, std, best);
    if (!(ei >= 0.0) || !(pi >= 0.0 && pi <= 1.0)) return {false, "acquisition out of range"};
  }
  for (double s : {0.5, 1.0, 2.0}) {
    if (std::abs(expected_improvement(3.0, s, 3.0) - 0.398942 * s) > 1e-6)
      return {false, "EI(mean=best) mismatch at std " + std::to_string(s)};
  }
  std::ostringstream msg;
  msg << "max training error " << worst << ", 10000 acquisition triples in range";
  return {true, msg.str()};
}

Outcome ernest_recovery() {
  // Seven cluster sizes, so each leave-one-out fit has more rows than features.
  const auto space = testing::wide_node_space();
  double worst = 0.0;
  std::size_t workloads = 0;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto data = generate_synthetic(space, 5, 4000 + seed, Scenario::ernest_exact());
    for (std::size_t w = 0; w < 5; ++w) {
      const auto pred = linear_predict_loo(data.table, w, Target::Time);
      for (const auto& e : pred.ranking)
        worst = std::max(worst, std::abs(e.predicted - data.table.lookup(w, e.point, Target::Time)));
      const auto fstar = true_minimum(data.table, w, Target::Time);
      if (regret(data.table.lookup(w, pred.recommended().point, Target::Time), fstar.value) != 0.0)
        return {false, "nonzero regret on workload " + data.table.workloads()[w]};
      ++workloads;
    }
  }
  if (worst > 1e-6) return {false, "prediction error " + std::to_string(worst)};
  std::ostringstream msg;
  msg << workloads << " workloads with regret 0, max prediction error " << worst;
  return {true, msg.str()};
}

Outcome savings_identities() {
  if (savings(0.0, 2.5, 2.5, 64) != 0.0) return {false, "S != 0 for C_opt = 0, R_opt = R_rand"};
  const auto space = SearchSpace::reference();
  std::ostringstream msg;
  for (std::uint64_t table_seed = 0; table_seed < 5; ++table_seed) {
    const auto data = generate_synthetic(space, 10, 5000 + table_seed, Scenario::neutral());
    ExperimentPlan plan;
    plan.algorithms = {AlgorithmSpec::parse("exhaustive"), AlgorithmSpec::parse("cb:rbfopt")};
    plan.budgets = {33};
    plan.seeds = 10;
    plan.production_runs = 64;
    plan.seed = table_seed;
    plan.jobs = 4;
    const auto results = run_plan(plan, data.table);
    std::map<std::pair<std::string, Target>, std::vector<double>> by_algo;
    for (const auto& s : results.savings) {
      if (s.algorithm == "exhaustive" && !(s.savings < 0.0))
        return {false, "exhaustive savings not negative on " + s.workload};
      by_algo[{s.algorithm, s.target}].push_back(s.savings);
    }
    for (Target t : {Target::Cost, Target::Time}) {
      const double cb = box_stats(by_algo[{"cb:rbfopt", t}]).median;
      const double ex = box_stats(by_algo[{"exhaustive", t}]).median;
      if (!(cb > ex)) {
        std::ostringstream fail;
        fail << "table " << table_seed << " " << to_string(t) << ": CB median " << cb << " <= exhaustive " << ex;
        return {false, fail.str()};
      }
      if (table_seed == 0) msg << to_string(t) << " medians CB " << cb << " vs exhaustive " << ex << "; ";
    }
  }
  msg << "5 tables";
  return {true, msg.str()};
}

Outcome sweep_determinism() {
  namespace fs = std::filesystem;
  const auto root = fs::temp_directory_path() / "mcopt_acceptance_sweep";
  fs::remove_all(root);
  fs::create_directories(root);
  std::ostringstream sink;
  const auto data = (root / "data.csv").string();
  if (cli::run({"gen", "--workloads", "3", "--seed", "11", "--out", data}, sink, sink) != 0)
    return {false, "gen failed"};
  const auto sweep = [&](const std::string& out, const std::string& jobs) {
    return cli::run({"sweep", "--data", data, "--budgets", "11,22,33", "--seeds", "10", "--jobs", jobs, "--out",
                     (root / out).string()},
                    sink, sink);
  };
  if (sweep("a", "1") != 0 || sweep("b", "1") != 0 || sweep("c", "8") != 0) return {false, "sweep failed"};
  for (const char* file : {"regret.csv", "savings.csv"}) {
    const auto a = csv::read_text(root / "a" / file);
    if (a != csv::read_text(root / "b" / file)) return {false, std::string(file) + " differs between runs"};
    if (a != csv::read_text(root / "c" / file)) return {false, std::string(file) + " differs for --jobs 8"};
  }
  fs::remove_all(root);
  return {true, "regret.csv and savings.csv identical across reruns and --jobs 1/8"};
}

Outcome box_statistics() {
  const auto outlier = box_stats({0, 0, 0, 0, 100});
  const auto ramp = box_stats({1, 2, 3, 4, 5});
  if (outlier.whisker_high != 0.0) return {false, "whisker_high " + std::to_string(outlier.whisker_high)};
  if (ramp.q25 != 2.0 || ramp.median != 3.0 || ramp.q75 != 4.0) return {false, "quartiles of 1..5 wrong"};
  return {true, "whisker_high 0; quartiles (2, 3, 4)"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_s;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"budget arithmetic", 1, budget_arithmetic},
      {"exhaustive optimality", 10, exhaustive_optimality},
      {"random search oracle", 60, random_search_oracle},
      {"planted provider recovery", 60, planted_provider},
      {"CloudBandit budget dominance", 60, budget_dominance},
      {"GP correctness", 10, gp_correctness},
      {"ernest-exact recovery", 10, ernest_recovery},
      {"savings identities", 120, savings_identities},
      {"sweep determinism", 120, sweep_determinism},
      {"box statistics", 1, box_statistics},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > criteria[i].limit_s) {
      o.pass = false;
      o.detail += " (over time limit)";
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "] " << criteria[i].name << " (" << secs
              << " s): " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
