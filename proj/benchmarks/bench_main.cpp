#include <benchmark/benchmark.h>

#include "mcopt/mcopt.hpp"

using namespace mcopt;

namespace {

const SyntheticDataset& dataset() {
  static const auto data = generate_synthetic(SearchSpace::reference(), 1, 1, Scenario::neutral());
  return data;
}

void BM_GpFit(benchmark::State& state) {
  const auto space = SearchSpace::reference();
  const auto all = enumerate_all(space);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<EncodedPoint> X;
  std::vector<double> y;
  for (std::size_t i = 0; i < n; ++i) {
    X.push_back(encode_flat(space, all[i]));
    y.push_back(dataset().table.measurement(0, i).runtime_s);
  }
  for (auto _ : state) benchmark::DoNotOptimize(GpModel::fit(X, y));
}
BENCHMARK(BM_GpFit)->Arg(11)->Arg(33)->Arg(88);

void BM_RunBbo(benchmark::State& state) {
  const auto kind = static_cast<BboKind>(state.range(0));
  const auto& table = dataset().table;
  const auto candidates = CandidateSet::flattened(table.space());
  const Objective f = [&](const ConfigPoint& p) { return table.lookup(0, p, Target::Time); };
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_bbo(kind, candidates, f, 33, seed++));
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_RunBbo)
    ->Arg(static_cast<int>(BboKind::RandomSearch))
    ->Arg(static_cast<int>(BboKind::CherryPickBO))
    ->Arg(static_cast<int>(BboKind::BilalTimeBO))
    ->Arg(static_cast<int>(BboKind::RbfOpt));

void BM_CloudBandit(benchmark::State& state) {
  const auto& table = dataset().table;
  const Objective f = [&](const ConfigPoint& p) { return table.lookup(0, p, Target::Cost); };
  const CloudBanditOptions opts{static_cast<std::size_t>(state.range(0)), 2.0, {}};
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(cloudbandit(table.space(), f, BboKind::RbfOpt, opts, seed++));
}
BENCHMARK(BM_CloudBandit)->Arg(1)->Arg(3)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
