#include <benchmark/benchmark.h>

#include <cmath>
#include <limits>

#include "vmdkit/signal.hpp"
#include "vmdkit/unfolded.hpp"
#include "vmdkit/vmd.hpp"

namespace {

vmdkit::RealVec mixed_signal(std::size_t T) {
  vmdkit::signal::SyntheticSpec spec;
  spec.tones = {{0.013, 1.0, 0.1}, {0.071, 0.7, 0.4}, {0.19, 0.4, 2.0}, {0.33, 0.2, 1.1}};
  spec.noise_std = 0.05;
  spec.length = T;
  spec.seed = 17;
  return vmdkit::signal::gen_synthetic(spec).values;
}

void BM_Iterative(benchmark::State& state) {
  const auto T = static_cast<std::size_t>(state.range(0));
  const auto x = mixed_signal(T);
  vmdkit::vmd::VmdConfig cfg;
  cfg.modes = static_cast<std::size_t>(state.range(1));
  cfg.tol = std::numeric_limits<double>::denorm_min();  // run the full iteration budget
  cfg.max_iter = 500;
  for (auto _ : state) benchmark::DoNotOptimize(vmdkit::vmd::vmd_decompose(x, cfg));
  state.counters["iterations"] = 500;
}

void BM_Unfolded(benchmark::State& state) {
  const auto T = static_cast<std::size_t>(state.range(0));
  const auto K = static_cast<std::size_t>(state.range(1));
  const auto x = mixed_signal(T);
  const auto params = vmdkit::unfolded::Params::initial(K, 1, T);
  for (auto _ : state) benchmark::DoNotOptimize(vmdkit::unfolded::decompose_with(params, x));
}

void BM_Analysis(benchmark::State& state) {
  const auto x = mixed_signal(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(vmdkit::signal::analysis(x));
  state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(BM_Iterative)->ArgsProduct({{1024, 4096}, {3, 13}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Unfolded)->ArgsProduct({{1024, 4096, 16384}, {3, 13}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Analysis)->RangeMultiplier(4)->Range(1024, 16384)->Complexity();
BENCHMARK_MAIN();
