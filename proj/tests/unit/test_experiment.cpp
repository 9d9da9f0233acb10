#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "mcopt/errors.hpp"
#include "mcopt/experiment.hpp"
#include "mcopt/rng.hpp"
#include "test_support.hpp"

using namespace mcopt;

TEST_CASE("regret examples") {
  CHECK(regret(3.0, 3.0) == 0.0);
  CHECK(regret(1.5 * 4.0, 4.0) == doctest::Approx(0.5));
  CHECK(regret(0.1, 0.05) == doctest::Approx(1.0));
  CHECK_THROWS_AS(regret(0.9, 1.0), IntegrityError);
  CHECK_THROWS_AS(regret(1.0, 0.0), DomainError);
}

TEST_CASE("true minimum") {
  const auto space = SearchSpace::reference();
  const auto constant = testing::table_from_values(space, std::vector<double>(88, 2.0));
  const auto m = true_minimum(constant, 0, Target::Time);
  CHECK(m.point == space.point_at(0));
  CHECK(m.value == 2.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto data = generate_synthetic(space, 1, seed, Scenario::dominant(2, 0.1));
    CHECK(true_minimum(data.table, 0, Target::Cost).point.provider == 2);
    CHECK(true_minimum(data.table, 0, Target::Time).point.provider == 2);
  }
}

TEST_CASE("expected random-search regret") {
  const auto space = SearchSpace::reference();
  const auto data = generate_synthetic(space, 2, 4, Scenario::neutral());
  for (Target t : {Target::Time, Target::Cost}) {
    const auto values = data.table.values(1, t);
    const double fstar = *std::min_element(values.begin(), values.end());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    CHECK(expected_rs_regret(data.table, 1, t, 1) == doctest::Approx((mean - fstar) / fstar).epsilon(1e-12));

    double previous = 1e300;
    for (std::size_t B = 1; B <= 200; ++B) {
      const double r = expected_rs_regret(data.table, 1, t, B);
      CHECK(r >= 0.0);
      CHECK(r < previous);
      previous = r;
    }
    // Regret is invariant under scaling every value by a positive constant.
    std::vector<double> scaled;
    for (double v : values) scaled.push_back(3.7 * v);
    const auto scaled_table = testing::table_from_values(space, scaled);
    for (std::size_t B : {1u, 11u, 33u})
      CHECK(expected_rs_regret(scaled_table, 0, Target::Time, B) ==
            doctest::Approx(expected_rs_regret(data.table, 1, t, B)).epsilon(1e-9));
  }

  // Unique minimum with a margin of at least 1%: B = 10 M is essentially exhaustive.
  std::vector<double> values(88);
  for (std::size_t i = 0; i < 88; ++i) values[i] = 1.0 + 0.02 * static_cast<double>((i * 37) % 88);
  const auto margin_table = testing::table_from_values(space, values);
  CHECK(expected_rs_regret(margin_table, 0, Target::Time, 880) < 1e-3);

  const SearchSpace one({{"p", {{"a", {"x"}}}}}, {2});
  const auto single = testing::table_from_values(one, {5.0});
  for (std::size_t B : {1u, 4u, 100u}) CHECK(expected_rs_regret(single, 0, Target::Time, B) == 0.0);
}

TEST_CASE("savings identities") {
  CHECK(savings(0.0, 3.0, 3.0, 64) == 0.0);
  CHECK(savings(0.0, 1.0, 2.0, 10) == doctest::Approx(0.5));
  CHECK(savings(10.0, 1.0, 2.0, 10) == doctest::Approx(0.0));
  CHECK(savings(30.0, 1.0, 2.0, 10) < 0.0);
  CHECK_THROWS_AS(savings(1.0, 1.0, 0.0, 10), DomainError);
  CHECK_THROWS_AS(savings(1.0, 1.0, 1.0, 0), DomainError);
}

TEST_CASE("algorithm spec grammar") {
  CHECK(AlgorithmSpec::parse("rs").meta == MetaAlgorithm::RandomSearch);
  CHECK(AlgorithmSpec::parse("random").meta == MetaAlgorithm::RandomSearch);
  CHECK(AlgorithmSpec::parse("exhaustive").meta == MetaAlgorithm::Exhaustive);
  CHECK(AlgorithmSpec::parse("linear-pred").meta == MetaAlgorithm::LinearPredictor);
  const auto cb = AlgorithmSpec::parse("cb:rbfopt");
  CHECK(cb.meta == MetaAlgorithm::CloudBandit);
  CHECK(cb.component == BboKind::RbfOpt);
  CHECK(cb.name == "cb:rbfopt");
  CHECK(AlgorithmSpec::parse("cloudbandit:cherrypick").meta == MetaAlgorithm::CloudBandit);
  CHECK(AlgorithmSpec::parse("flat:cherrypick").meta == MetaAlgorithm::Flattened);
  const auto bilal = AlgorithmSpec::parse("indep:bilal");
  CHECK(bilal.meta == MetaAlgorithm::Independent);
  CHECK(bilal.component_for(Target::Cost) == BboKind::BilalCostBO);
  CHECK(bilal.component_for(Target::Time) == BboKind::BilalTimeBO);
  CHECK(AlgorithmSpec::parse("indep:bilal-cost").component_for(Target::Time) == BboKind::BilalCostBO);
  CHECK_THROWS_AS(AlgorithmSpec::parse("cb"), DomainError);
  CHECK_THROWS_AS(AlgorithmSpec::parse("rs:cherrypick"), DomainError);
  CHECK_THROWS_AS(AlgorithmSpec::parse("smac"), DomainError);
  CHECK_THROWS_AS(AlgorithmSpec::parse("cb:hyperopt"), DomainError);
}

TEST_CASE("run_plan record counts and savings consistency") {
  const auto space = SearchSpace::reference();
  const auto data = generate_synthetic(space, 2, 1, Scenario::neutral());
  ExperimentPlan plan;
  plan.algorithms = {AlgorithmSpec::parse("rs"), AlgorithmSpec::parse("exhaustive")};
  plan.seed = 5;
  const auto results = run_plan(plan, data.table);
  // 8 budgets x 50 seeds x 2 targets per (workload, algorithm).
  CHECK(results.regret.size() == 2 * 2 * 8 * 50 * 2);
  std::map<std::pair<std::string, std::string>, std::size_t> counts;
  for (const auto& r : results.regret) {
    ++counts[{r.workload, r.algorithm}];
    CHECK(r.regret == doctest::Approx((r.found - r.fstar) / r.fstar));
    CHECK(r.regret >= 0.0);
  }
  for (const auto& [key, n] : counts) CHECK(n == 8 * 50 * 2);
  CHECK(results.savings.size() == 2 * 2 * 8 * 2);
  for (const auto& s : results.savings) {
    const double N = static_cast<double>(s.production_runs);
    CHECK(s.savings == doctest::Approx((N * s.random_expense - (s.search_expense + N * s.run_expense)) /
                                       (N * s.random_expense)));
    if (s.algorithm == "exhaustive") CHECK(s.savings < 0.0);
    if (s.algorithm == "exhaustive") {
      const auto w = data.table.workload_index(s.workload);
      const auto values = data.table.values(w, s.target);
      double total = 0.0;
      for (double v : values) total += v;
      CHECK(s.search_expense == doctest::Approx(total));
      CHECK(s.random_expense == doctest::Approx(total / static_cast<double>(values.size())));
    }
  }
}

TEST_CASE("run_plan is independent of job count and validates") {
  const auto space = SearchSpace::reference();
  const auto data = generate_synthetic(space, 2, 2, Scenario::neutral());
  ExperimentPlan plan;
  plan.algorithms = {AlgorithmSpec::parse("cb:rbfopt"), AlgorithmSpec::parse("indep:bilal"),
                     AlgorithmSpec::parse("flat:cherrypick")};
  plan.budgets = {11, 33};
  plan.seeds = 3;
  const auto one = run_plan(plan, data.table);
  plan.jobs = 6;
  const auto six = run_plan(plan, data.table);
  REQUIRE(one.regret.size() == six.regret.size());
  for (std::size_t i = 0; i < one.regret.size(); ++i) {
    CHECK(one.regret[i].found == six.regret[i].found);
    CHECK(one.regret[i].algorithm == six.regret[i].algorithm);
  }
  for (std::size_t i = 0; i < one.savings.size(); ++i) CHECK(one.savings[i].savings == six.savings[i].savings);

  ExperimentPlan bad = plan;
  bad.budgets = {33, 11};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = plan;
  bad.seeds = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = plan;
  bad.algorithms.clear();
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = plan;
  bad.workloads = {"nope"};
  CHECK_THROWS_AS(run_plan(bad, data.table), DomainError);
}

TEST_CASE("cell seeds depend on every coordinate") {
  const auto base = cell_seed(1, "w0", "rs", Target::Cost, 11, 0);
  CHECK(base == cell_seed(1, "w0", "rs", Target::Cost, 11, 0));
  CHECK(base != cell_seed(2, "w0", "rs", Target::Cost, 11, 0));
  CHECK(base != cell_seed(1, "w1", "rs", Target::Cost, 11, 0));
  CHECK(base != cell_seed(1, "w0", "exhaustive", Target::Cost, 11, 0));
  CHECK(base != cell_seed(1, "w0", "rs", Target::Time, 11, 0));
  CHECK(base != cell_seed(1, "w0", "rs", Target::Cost, 22, 0));
  CHECK(base != cell_seed(1, "w0", "rs", Target::Cost, 11, 1));
}

TEST_CASE("box statistics") {
  auto s = box_stats({1, 2, 3, 4, 5});
  CHECK(s.median == 3.0);
  CHECK(s.q25 == 2.0);
  CHECK(s.q75 == 4.0);
  CHECK(s.whisker_low == 1.0);
  CHECK(s.whisker_high == 5.0);

  s = box_stats({0, 0, 0, 0, 100});
  CHECK(s.whisker_high == 0.0);
  CHECK(s.whisker_low == 0.0);

  s = box_stats({7, 7, 7});
  CHECK(s.q25 == 7.0);
  CHECK(s.q75 == 7.0);
  CHECK(s.whisker_low == 7.0);
  CHECK(s.whisker_high == 7.0);

  s = box_stats({4, 1, 3, 2});
  CHECK(s.median == 2.5);
  CHECK(s.q25 == 1.75);
  CHECK(s.q75 == 3.25);

  CHECK_THROWS_AS(box_stats({}), DomainError);

  // Whiskers stay within 1.5 IQR and on data points, for random samples.
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + rng.index(30));
    for (auto& x : v) x = rng.uniform() < 0.1 ? rng.uniform(-100, 100) : rng.uniform(0, 1);
    const auto b = box_stats(v);
    const double iqr = b.q75 - b.q25;
    CHECK(b.q25 <= b.median);
    CHECK(b.median <= b.q75);
    CHECK(b.whisker_high <= b.q75 + 1.5 * iqr + 1e-12);
    CHECK(b.whisker_low >= b.q25 - 1.5 * iqr - 1e-12);
    CHECK(std::find(v.begin(), v.end(), b.whisker_high) != v.end());
    CHECK(std::find(v.begin(), v.end(), b.whisker_low) != v.end());
  }
}

TEST_CASE("aggregation is permutation invariant") {
  std::vector<RegretRecord> records;
  std::vector<SavingsRecord> savings_records;
  Rng rng(9);
  for (int i = 0; i < 300; ++i) {
    RegretRecord r;
    r.workload = "w" + std::to_string(i % 4);
    r.algorithm = i % 3 == 0 ? "rs" : "cb:rbfopt";
    r.target = i % 2 == 0 ? Target::Cost : Target::Time;
    r.budget = 11 * (1 + static_cast<std::size_t>(i % 5));
    r.fstar = 1.0;
    r.regret = rng.uniform(0, 3);
    r.found = 1.0 + r.regret;
    records.push_back(r);
    SavingsRecord s;
    s.workload = r.workload + "-" + std::to_string(i);
    s.algorithm = r.algorithm;
    s.target = r.target;
    s.budget = r.budget;
    s.savings = rng.uniform(-1, 1);
    savings_records.push_back(s);
  }
  const auto regret_before = mean_regret_table(records);
  const auto savings_before = savings_box_table(savings_records);
  for (int round = 0; round < 5; ++round) {
    for (std::size_t i = records.size(); i > 1; --i) {
      const auto j = rng.index(i);
      std::swap(records[i - 1], records[j]);
      std::swap(savings_records[i - 1], savings_records[j]);
    }
    const auto regret_after = mean_regret_table(records);
    REQUIRE(regret_after.size() == regret_before.size());
    for (std::size_t i = 0; i < regret_after.size(); ++i) {
      CHECK(regret_after[i].algorithm == regret_before[i].algorithm);
      CHECK(regret_after[i].mean_regret == regret_before[i].mean_regret);
      CHECK(regret_after[i].count == regret_before[i].count);
    }
    const auto savings_after = savings_box_table(savings_records);
    REQUIRE(savings_after.size() == savings_before.size());
    for (std::size_t i = 0; i < savings_after.size(); ++i) {
      CHECK(savings_after[i].stats.median == savings_before[i].stats.median);
      CHECK(savings_after[i].stats.whisker_low == savings_before[i].stats.whisker_low);
    }
  }
}

TEST_CASE("run_algorithm dispatch") {
  const auto space = SearchSpace::reference();
  const auto data = generate_synthetic(space, 1, 3, Scenario::neutral());
  const auto exhaustive = run_algorithm(AlgorithmSpec::parse("exhaustive"), data.table, 0, Target::Cost, 11, 1);
  CHECK(exhaustive.total_evals == 88);
  CHECK(exhaustive.loss == true_minimum(data.table, 0, Target::Cost).value);
  const auto cb = run_algorithm(AlgorithmSpec::parse("cb:cherrypick"), data.table, 0, Target::Time, 40, 1);
  CHECK(cb.total_evals == 33);
  const auto rs = run_algorithm(AlgorithmSpec::parse("rs"), data.table, 0, Target::Time, 17, 1);
  CHECK(rs.total_evals == 17);
  const auto lp = run_algorithm(AlgorithmSpec::parse("linear-pred"), data.table, 0, Target::Time, 11, 1);
  CHECK(lp.total_evals == 88);
  CHECK_THROWS_AS(run_algorithm(AlgorithmSpec::parse("cb:rbfopt"), data.table, 0, Target::Time, 10, 1), BudgetError);
}
