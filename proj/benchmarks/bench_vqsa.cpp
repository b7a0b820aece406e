#include <benchmark/benchmark.h>

#include <vector>

#include "steerfid/oracle.hpp"
#include "steerfid/states.hpp"
#include "steerfid/vqsa.hpp"

using namespace steerfid;

namespace {

std::vector<double> angles(std::size_t n) {
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = 0.1 * static_cast<double>(i % 17);
  return p;
}

}  // namespace

static void BM_ExactRewardGhz4(benchmark::State& state) {
  NamedStateSpec spec;
  spec.kind = StateKind::depolarized_ghz4;
  const SteeringProblem problem(build_state(spec), default_partitions(spec), 16, 4, 4);
  const auto p = angles(problem.num_params());
  for (auto _ : state) benchmark::DoNotOptimize(problem.exact(p).global);
}
BENCHMARK(BM_ExactRewardGhz4);

static void BM_SampledRewardGhz4(benchmark::State& state) {
  NamedStateSpec spec;
  spec.kind = StateKind::depolarized_ghz4;
  const SteeringProblem problem(build_state(spec), default_partitions(spec), 16, 4, 4);
  const auto p = angles(problem.num_params());
  CounterRng rng(6);
  for (auto _ : state) benchmark::DoNotOptimize(problem.sampled(p, RewardKind::global, 1024, rng));
}
BENCHMARK(BM_SampledRewardGhz4);

static void BM_OracleBellMixture(benchmark::State& state) {
  const DensityMatrix rho = build_state(NamedStateSpec{});
  for (auto _ : state) benchmark::DoNotOptimize(fs_bruteforce(rho, {{"A"}, {"B"}}));
}
BENCHMARK(BM_OracleBellMixture)->Unit(benchmark::kMillisecond);
