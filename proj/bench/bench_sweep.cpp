// Seed sweeps over the three designs: serial reference vs the OpenMP version.
//
//   cmake --build build --target bench_sweep
//   OMP_NUM_THREADS=4 ./build/bench/bench_sweep
//
// Both functions return identical outcomes; only wall time differs.

#include <numeric>
#include <vector>

#include <benchmark/benchmark.h>

#include "wfsim/config.hpp"
#include "wfsim/sweep.hpp"

namespace {

const wfsim::ExperimentConfig& uc1() {
  static const wfsim::ExperimentConfig config = wfsim::load_config(wfsim::builtin_config("uc1-desk"));
  return config;
}

std::vector<std::uint64_t> seeds(std::int64_t n) {
  std::vector<std::uint64_t> s(static_cast<std::size_t>(n));
  std::iota(s.begin(), s.end(), 1);
  return s;
}

constexpr wfsim::Design kDesigns[] = {wfsim::Design::D1, wfsim::Design::D2, wfsim::Design::D2A};

void BM_SweepSerial(benchmark::State& state) {
  auto s = seeds(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wfsim::sweep_serial(uc1(), kDesigns, s, true));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 3);
}

void BM_SweepParallel(benchmark::State& state) {
  auto s = seeds(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wfsim::sweep_parallel(uc1(), kDesigns, s, true));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 3);
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(4)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(4)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
