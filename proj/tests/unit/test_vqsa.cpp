#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "steerfid/errors.hpp"
#include "steerfid/oracle.hpp"
#include "steerfid/random_states.hpp"
#include "steerfid/spsa.hpp"
#include "steerfid/states.hpp"
#include "steerfid/vqsa.hpp"
#include "support.hpp"

using namespace steerfid;
using steerfid::ref::max_abs;

namespace {

constexpr double kBellMixtureFs = 0.9330127018922193;  // (2 + sqrt 3) / 4

std::vector<double> random_params(std::size_t n, CounterRng& rng) {
  std::vector<double> p(n);
  for (auto& v : p) v = 6.283185307179586 * (rng.uniform() - 0.5);
  return p;
}

const std::vector<Labels> kAB{{"A"}, {"B"}};

}  // namespace

TEST(Rewards, GlobalAndLocalBracketEachOther) {
  CounterRng rng(1);
  NamedStateSpec spec;
  spec.kind = StateKind::depolarized_ghz4;
  const DensityMatrix rho = build_state(spec);
  const SteeringProblem problem(rho, default_partitions(spec), 8, 2, 2);
  ASSERT_EQ(problem.measured_qubits(), 2U);
  for (int i = 0; i < 30; ++i) {
    const RewardPair r = problem.exact(random_params(problem.num_params(), rng));
    const double n = static_cast<double>(r.n);
    // Union bound below, averaging above.
    EXPECT_GE(r.global, 1.0 - n * (1.0 - r.local) - 1e-12);
    EXPECT_LE(r.global, r.local + 1e-12);
    EXPECT_GE(r.global, -1e-12);
    EXPECT_LE(r.local, 1.0 + 1e-12);
  }
}

TEST(Rewards, SingleMeasuredQubitMakesRewardsEqual) {
  CounterRng rng(2);
  const SteeringProblem problem(build_state(NamedStateSpec{}), kAB, 4, 2, 2);
  ASSERT_EQ(problem.measured_qubits(), 1U);
  for (int i = 0; i < 20; ++i) {
    const RewardPair r = problem.exact(random_params(problem.num_params(), rng));
    EXPECT_NEAR(r.global, r.local, 1e-12);
  }
}

TEST(Rewards, NeverExceedFidelityOfSeparability) {
  CounterRng rng(3);
  const SteeringProblem problem(build_state(NamedStateSpec{}), kAB, 4, 2, 2);
  double best = 0.0;
  for (int i = 0; i < 200; ++i) best = std::max(best, problem.exact(random_params(problem.num_params(), rng)).global);
  EXPECT_LE(best, kBellMixtureFs + 1e-9);
}

TEST(Rewards, ZeroParametersOnBellMixture) {
  // W = I, U = I: outcome 0 with weight 3/4 steers Phi+, outcome 1 steers Phi-;
  // both leave A in |0> with probability 1/2.
  const SteeringProblem problem(build_state(NamedStateSpec{}), kAB, 4, 2, 2);
  const std::vector<double> zeros(problem.num_params(), 0.0);
  EXPECT_NEAR(problem.exact(zeros).global, 0.5, 1e-12);
  const auto q = problem.outcome_probs(std::vector<double>(problem.w_param_count(), 0.0));
  ASSERT_EQ(q.size(), 4U);
  EXPECT_NEAR(q[0], 0.75, 1e-12);
  EXPECT_NEAR(q[1], 0.25, 1e-12);
}

TEST(Rewards, SampledEstimateIsUnbiased) {
  CounterRng rng(4);
  NamedStateSpec spec;
  spec.kind = StateKind::depolarized_ghz4;
  const SteeringProblem problem(build_state(spec), default_partitions(spec), 8, 1, 1);
  const auto params = random_params(problem.num_params(), rng);
  const RewardPair exact = problem.exact(params);
  const std::size_t shots = 200000;
  for (const auto kind : {RewardKind::global, RewardKind::local}) {
    const double target = kind == RewardKind::global ? exact.global : exact.local;
    CounterRng stream = rng.split(static_cast<std::uint64_t>(kind));
    const double estimate = problem.sampled(params, kind, shots, stream);
    const double sigma = std::sqrt(target * (1.0 - target) / static_cast<double>(shots));
    EXPECT_LT(std::abs(estimate - target), 5.0 * sigma + 1e-12);
  }
}

TEST(Rewards, SampledIsReproducibleForEqualStreams) {
  CounterRng rng(5);
  const SteeringProblem problem(build_state(NamedStateSpec{}), kAB, 2, 1, 1);
  const auto params = random_params(problem.num_params(), rng);
  CounterRng a(99);
  CounterRng b(99);
  EXPECT_EQ(problem.sampled(params, RewardKind::global, 1000, a), problem.sampled(params, RewardKind::global, 1000, b));
}

TEST(SteeringProblem, ParameterCountsAndTableRoundTrip) {
  const SteeringProblem problem(build_state(NamedStateSpec{}), kAB, 4, 3, 2);
  EXPECT_EQ(problem.w_param_count(), 2U * 2U * 3U);
  EXPECT_EQ(problem.u_param_count(), 2U * 1U * 2U);
  EXPECT_EQ(problem.num_params(), 12U + 4U * 4U);
  CounterRng rng(6);
  const auto joint = random_params(problem.num_params(), rng);
  const OutcomeTable table = problem.outcome_table(joint);
  const auto w = std::vector<double>(joint.begin(), joint.begin() + 12);
  EXPECT_EQ(problem.joint_params(w, table), joint);
  EXPECT_THROW(SteeringProblem(build_state(NamedStateSpec{}), kAB, 3, 1, 1), ConfigError);
}

TEST(PureStateTest, ExamplesAndOracle) {
  EXPECT_NEAR(pure_state_test(bell_state(0), {"A"}), 0.75, 1e-14);
  const PureState product = PureState::basis(Layout({{"A", 2}, {"B", 3}}), 4);
  EXPECT_NEAR(pure_state_test(product, {"A"}), 1.0, 1e-14);
  CounterRng rng(7);
  for (int i = 0; i < 20; ++i) {
    const PureState psi = random_pure_state(Layout({{"A", 3}, {"B", 2}}), rng);
    EXPECT_NEAR(pure_state_test(psi, {"A"}), 0.5 * (1.0 + fs_pure(psi, {{"A"}, {"B"}})), 1e-9);
  }
}

TEST(PureStateTest, SwapTestIdentity) {
  // Tr[Pi_sym (phi (x) phi')] = 1/2 (1 + |<phi|phi'>|^2) for pure inputs.
  CounterRng rng(8);
  for (int i = 0; i < 20; ++i) {
    const Vector a = random_pure_state(Layout({{"A", 3}}), rng).amplitudes();
    const Vector b = random_pure_state(Layout({{"A", 3}}), rng).amplitudes();
    const Vector ab = tensor(a, b);
    const double lhs = (ab.adjoint() * symmetric_projector(3) * ab)(0, 0).real();
    EXPECT_NEAR(lhs, 0.5 * (1.0 + std::norm(a.dot(b))), 1e-12);
  }
}

TEST(EbAcceptance, DirectMatchesExpansionAndIsBounded) {
  CounterRng rng(9);
  NamedStateSpec ghz;
  ghz.kind = StateKind::ghz;
  ghz.n_parties = 3;
  const std::vector<std::pair<DensityMatrix, std::vector<Labels>>> cases{
      {build_state(NamedStateSpec{}), kAB},
      {build_state(ghz), default_partitions(ghz)},
      {random_density_matrix(Layout({{"A", 2}, {"B", 3}}), rng, 3), kAB},
  };
  const std::vector<double> fs{kBellMixtureFs, 0.5, fs_bruteforce(cases[2].first, kAB)};
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& [rho, parts] = cases[c];
    std::vector<std::size_t> dims;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) dims.push_back(rho.layout().dim_of(parts[i]));
    const std::size_t r = default_ref_dim(rho);
    for (int i = 0; i < 20; ++i) {
      const EbChannelSpec eb = random_eb_spec(r, r + rng.below(3), dims, rng);
      const EbAcceptance acc = eb_acceptance_detail(rho, parts, eb);
      EXPECT_NEAR(acc.direct, acc.expansion, 1e-12);
      EXPECT_LE(acc.direct, 0.5 * (1.0 + fs[c]) + 1e-9);
      EXPECT_GE(acc.direct, 0.5 - 1e-12);
    }
  }
}

TEST(EbAcceptance, OracleChannelAttainsBound) {
  const DensityMatrix rho = build_state(NamedStateSpec{});
  const OracleReport report = fs_bruteforce_report(rho, kAB);
  EXPECT_NEAR(eb_acceptance(rho, kAB, eb_from_report(report)), 0.5 * (1.0 + report.value), 1e-8);
}

TEST(EbAcceptance, InvalidSpecsRejected) {
  const DensityMatrix rho = build_state(NamedStateSpec{});
  EbChannelSpec eb;
  EXPECT_THROW((void)eb_acceptance(rho, kAB, eb), ConfigError);
  eb.povm = {steerfid::ref::ket_bra(2, 0, 0), steerfid::ref::ket_bra(2, 0, 0)};
  eb.preps = {{Vector::Unit(2, 0)}, {Vector::Unit(2, 1)}};
  EXPECT_THROW((void)eb_acceptance(rho, kAB, eb), ConfigError);
  eb.povm = {identity(2), Matrix::Zero(2, 2)};
  EXPECT_THROW((void)eb_acceptance(rho, kAB, eb), ConfigError);
}

TEST(Spsa, MinimizesOneDimensionalQuadratic) {
  const NoisyObjective f = [](std::span<const double> t, CounterRng&) { return (t[0] - 1.0) * (t[0] - 1.0); };
  SpsaConfig cfg;
  cfg.a = 0.2;
  cfg.c = 0.1;
  cfg.iterations = 500;
  const SpsaResult r = spsa_minimize(f, {0.0}, cfg, 1);
  EXPECT_NEAR(r.final_params[0], 1.0, 1e-2);
  EXPECT_EQ(r.records.size(), 500U);
}

TEST(Spsa, MinimizesNoisySphere) {
  const NoisyObjective f = [](std::span<const double> t, CounterRng& rng) {
    double s = 0.0;
    for (double v : t) s += v * v;
    return s + 0.01 * rng.normal();
  };
  const ExactObjective exact = [](std::span<const double> t) {
    double s = 0.0;
    for (double v : t) s += v * v;
    return s;
  };
  SpsaConfig cfg;
  cfg.a = 0.2;
  cfg.c = 0.1;
  cfg.iterations = 2000;
  const SpsaResult r = spsa_minimize(f, std::vector<double>(8, 1.0), cfg, 2, exact);
  EXPECT_LT(r.best_value, 0.05);
  EXPECT_LE(r.best_value, r.final_value + 1e-15);
  for (std::size_t i = 1; i < r.records.size(); ++i) {
    EXPECT_LE(r.records[i].best_value, r.records[i - 1].best_value);
  }
}

TEST(Spsa, DeterministicAcrossParallelism) {
  const NoisyObjective f = [](std::span<const double> t, CounterRng& rng) { return t[0] * t[0] + t[1] + rng.uniform(); };
  SpsaConfig cfg;
  cfg.iterations = 50;
  const SpsaResult a = spsa_minimize(f, {0.5, 0.5}, cfg, 7);
  cfg.parallel = false;
  const SpsaResult b = spsa_minimize(f, {0.5, 0.5}, cfg, 7);
  EXPECT_EQ(a.final_params, b.final_params);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].params_hash, b.records[i].params_hash);
}

TEST(RunVqsa, TraceIsBoundedAndReproducible) {
  VqsaConfig cfg;
  cfg.ref_dim = 4;
  cfg.spsa.iterations = 60;
  cfg.shots = 256;
  cfg.seed = 11;
  const VqsaTrace a = run_vqsa(NamedStateSpec{}, kAB, cfg);
  const VqsaTrace b = run_vqsa(NamedStateSpec{}, kAB, cfg);
  ASSERT_EQ(a.records.size(), 60U);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_GE(a.records[i].reward, 0.0);
    EXPECT_LE(a.records[i].reward, 1.0);
    EXPECT_EQ(a.records[i].params_hash, b.records[i].params_hash);
  }
  EXPECT_EQ(a.best_reward, b.best_reward);
  EXPECT_LE(a.best_reward, kBellMixtureFs + 1e-9);
}

TEST(RunVqsa, GhzReachesOneHalf) {
  NamedStateSpec spec;
  spec.kind = StateKind::ghz;
  spec.n_parties = 3;
  VqsaConfig cfg;
  cfg.ref_dim = 1;
  cfg.spsa.iterations = 400;
  cfg.shots.reset();
  const VqsaTrace t = run_vqsa(spec, default_partitions(spec), cfg);
  EXPECT_NEAR(t.best_reward, 0.5, 5e-3);
  EXPECT_LE(t.best_reward, 0.5 + 1e-9);
}

TEST(RunVqsa, RejectsBadConfig) {
  VqsaConfig cfg;
  cfg.restarts = 0;
  EXPECT_THROW((void)run_vqsa(NamedStateSpec{}, kAB, cfg), ConfigError);
  cfg.restarts = 1;
  cfg.init_spread = -1.0;
  EXPECT_THROW((void)run_vqsa(NamedStateSpec{}, kAB, cfg), ConfigError);
}
