#include <benchmark/benchmark.h>

#include "steerfid/qcore.hpp"
#include "steerfid/random_states.hpp"

using namespace steerfid;

static void BM_PartialTrace(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  CounterRng rng(1);
  const Layout l({{"A", n}, {"B", n}, {"C", 2}});
  const DensityMatrix rho = random_density_matrix(l, rng);
  for (auto _ : state) benchmark::DoNotOptimize(partial_trace(rho, {"A", "C"}));
}
BENCHMARK(BM_PartialTrace)->Arg(2)->Arg(4)->Arg(8);

static void BM_PartialTranspose(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  CounterRng rng(2);
  const Layout l({{"A", n}, {"B", n}});
  const Matrix m = random_density_matrix(l, rng).matrix();
  for (auto _ : state) benchmark::DoNotOptimize(partial_transpose(m, l, {"B"}));
}
BENCHMARK(BM_PartialTranspose)->Arg(2)->Arg(4)->Arg(8);

static void BM_FidelityExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  CounterRng rng(3);
  const Layout l({{"A", n}});
  const DensityMatrix a = random_density_matrix(l, rng);
  const DensityMatrix b = random_density_matrix(l, rng);
  for (auto _ : state) benchmark::DoNotOptimize(fidelity_exact(a, b));
}
BENCHMARK(BM_FidelityExact)->Arg(4)->Arg(16)->Arg(64);

static void BM_SymmetrizePermutations(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  CounterRng rng(4);
  std::vector<Subsystem> subs{{"S", 2}};
  Labels group;
  for (std::size_t i = 0; i < k; ++i) {
    group.push_back("X" + std::to_string(i + 1));
    subs.push_back({group.back(), 2});
  }
  const Layout l(subs);
  const Matrix m = random_density_matrix(l, rng).matrix();
  for (auto _ : state) benchmark::DoNotOptimize(symmetrize_permutations(m, l, group));
}
BENCHMARK(BM_SymmetrizePermutations)->DenseRange(2, 4);
