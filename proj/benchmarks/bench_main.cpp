#include <benchmark/benchmark.h>

#include "codedq/bos.hpp"
#include "codedq/chain.hpp"
#include "codedq/mmr.hpp"
#include "codedq/simulator.hpp"

using namespace codedq;

static void BM_BosStationary(benchmark::State& state) {
  const int r = static_cast<int>(state.range(0));
  const SystemConfig cfg(r, 0.9 * bos_capacity(r, 1.0), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bos_stationary(cfg));
  }
}
BENCHMARK(BM_BosStationary)->Arg(2)->Arg(4)->Arg(10);

static void BM_MmrStationary(benchmark::State& state) {
  const int r = static_cast<int>(state.range(0));
  const SystemConfig cfg(r, 0.9 * r, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mmr_stationary(cfg));
  }
}
BENCHMARK(BM_MmrStationary)->Arg(2)->Arg(10);

static void BM_DirectSolve(benchmark::State& state) {
  const SystemConfig cfg(2, 1.5, 1.0);
  const int levels = static_cast<int>(state.range(0));
  const GeneratorMatrix gen = build_generator(cfg, levels);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_stationary_direct(gen));
  }
}
BENCHMARK(BM_DirectSolve)->Arg(50)->Arg(200);

static void BM_SimulateBos(benchmark::State& state) {
  const SystemConfig cfg(2, 1.5, 1.0);
  SimOptions opt;
  opt.horizon = state.range(0);
  opt.warmup = opt.horizon / 10;
  opt.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_bos(cfg, opt));
  }
  state.SetItemsProcessed(state.iterations() * opt.horizon);
}
BENCHMARK(BM_SimulateBos)->Arg(20000);

static void BM_SimulateGreedy(benchmark::State& state) {
  const SystemConfig cfg(2, 1.5, 1.0);
  SimOptions opt;
  opt.horizon = state.range(0);
  opt.warmup = opt.horizon / 10;
  opt.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_greedy(cfg, opt));
  }
  state.SetItemsProcessed(state.iterations() * opt.horizon);
}
BENCHMARK(BM_SimulateGreedy)->Arg(20000);

BENCHMARK_MAIN();
