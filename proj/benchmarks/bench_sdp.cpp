#include <benchmark/benchmark.h>

#include "steerfid/benchmarks.hpp"
#include "steerfid/random_states.hpp"
#include "steerfid/states.hpp"

using namespace steerfid;

static void BM_FidelitySdp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  CounterRng rng(5);
  const Layout l({{"A", n}});
  const DensityMatrix a = random_density_matrix(l, rng);
  const DensityMatrix b = random_density_matrix(l, rng);
  for (auto _ : state) benchmark::DoNotOptimize(fidelity_sdp(a, b));
}
BENCHMARK(BM_FidelitySdp)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_Benchmark1BellMixture(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const DensityMatrix rho = build_state(NamedStateSpec{});
  for (auto _ : state) benchmark::DoNotOptimize(benchmark1(rho, {{"A"}, {"B"}}, k).value);
}
BENCHMARK(BM_Benchmark1BellMixture)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

static void BM_Benchmark2BellMixture(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const DensityMatrix rho = build_state(NamedStateSpec{});
  for (auto _ : state) benchmark::DoNotOptimize(benchmark2(rho, {{"A"}, {"B"}}, k).value);
}
BENCHMARK(BM_Benchmark2BellMixture)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);
