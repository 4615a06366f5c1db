// Serial reference vs OpenMP kernels. Run with --benchmark_filter to pick one.
#include <benchmark/benchmark.h>

#include <random>

#include "dispex/explanation_miner.hpp"
#include "dispex/kernels.hpp"
#include "dispex/subpop_miner.hpp"
#include "dispex/synthkit.hpp"
#include "dispex/util.hpp"

using namespace dispex;

namespace {

std::vector<TupleSet> random_sets(std::size_t count, std::size_t n) {
  std::mt19937_64 rng(1);
  std::vector<TupleSet> out;
  for (std::size_t i = 0; i < count; ++i) {
    TupleSet t(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (uniform01(rng) < 0.3) t.insert(j);
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<kernels::JoinRequest> all_pairs(const std::vector<TupleSet>& sets) {
  std::vector<kernels::JoinRequest> joins;
  for (const auto& a : sets) {
    for (const auto& b : sets) joins.push_back({&a, &b});
  }
  return joins;
}

void BM_IntersectSerial(benchmark::State& state) {
  const auto sets = random_sets(64, static_cast<std::size_t>(state.range(0)));
  const auto joins = all_pairs(sets);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::intersect_counts_serial(joins));
}

void BM_IntersectParallel(benchmark::State& state) {
  const auto sets = random_sets(64, static_cast<std::size_t>(state.range(0)));
  const auto joins = all_pairs(sets);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::intersect_counts_parallel(joins, 0));
}

void BM_JaccardSerial(benchmark::State& state) {
  const auto sets = random_sets(static_cast<std::size_t>(state.range(0)), 50'000);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::jaccard_matrix_serial(sets));
}

void BM_JaccardParallel(benchmark::State& state) {
  const auto sets = random_sets(static_cast<std::size_t>(state.range(0)), 50'000);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::jaccard_matrix_parallel(sets, 0));
}

struct Planted {
  synth::SyntheticData data;
  GroupContext groups;
  std::vector<Subpopulation> subs;

  explicit Planted(std::size_t n)
      : data(synth::generate(synth::planted_benchmark(n, 3))),
        groups(GroupContext::build(data.dataset, data.spec.g1, data.spec.g2)),
        subs(mine_frequent_subpopulations(data.dataset, 0.05, groups)) {}
};

void BM_MineAllSerial(benchmark::State& state) {
  const Planted p(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const ExplanationMiner miner(p.data.dataset, p.data.dag, p.groups, MinerConfig{});
    benchmark::DoNotOptimize(miner.mine_all_serial(p.subs));
  }
}

void BM_MineAllParallel(benchmark::State& state) {
  const Planted p(static_cast<std::size_t>(state.range(0)));
  MinerConfig cfg;
  cfg.workers = 0;
  for (auto _ : state) {
    const ExplanationMiner miner(p.data.dataset, p.data.dag, p.groups, cfg);
    benchmark::DoNotOptimize(miner.mine_all(p.subs));
  }
}

}  // namespace

BENCHMARK(BM_IntersectSerial)->Arg(10'000)->Arg(100'000);
BENCHMARK(BM_IntersectParallel)->Arg(10'000)->Arg(100'000);
BENCHMARK(BM_JaccardSerial)->Arg(32)->Arg(128);
BENCHMARK(BM_JaccardParallel)->Arg(32)->Arg(128);
BENCHMARK(BM_MineAllSerial)->Arg(20'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MineAllParallel)->Arg(20'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
