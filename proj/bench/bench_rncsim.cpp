#include <benchmark/benchmark.h>

#include <random>

#include "rncsim/gf256.hpp"
#include "rncsim/harness.hpp"

using namespace rncsim;

namespace {

ExperimentConfig sweep_config() {
  ExperimentConfig c;
  c.random = {30, 0.15, 2.0, 1.0};
  c.topology_seed = 7;
  c.lambda_sums = {0.2, 0.4, 0.6, 0.8};
  c.seeds = {1, 2};
  c.horizon = 5000;
  c.write_runs = false;
  return c;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto c = sweep_config();
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(c, Execution::serial));
}

void BM_SweepParallel(benchmark::State& state) {
  const auto c = sweep_config();
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(c, Execution::parallel));
}

std::vector<std::uint8_t> random_bytes(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<std::uint8_t> v(n);
  for (auto& x : v) x = static_cast<std::uint8_t>(rng());
  return v;
}

void BM_RegionTable(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto dst = random_bytes(n, 1);
  const auto src = random_bytes(n, 2);
  for (auto _ : state) {
    gf256::mul_add_region(dst, src, FieldElement(0x57));
    benchmark::DoNotOptimize(dst.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void BM_RegionReference(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto dst = random_bytes(n, 1);
  const auto src = random_bytes(n, 2);
  for (auto _ : state) {
    gf256::reference::mul_add_region(dst, src, 0x57);
    benchmark::DoNotOptimize(dst.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RegionTable)->Range(64, 64 << 10);
BENCHMARK(BM_RegionReference)->Range(64, 64 << 10);

BENCHMARK_MAIN();
