#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>

#include "steerfid/benchmarks.hpp"
#include "steerfid/errors.hpp"
#include "steerfid/random_states.hpp"
#include "steerfid/sdp.hpp"
#include "steerfid/states.hpp"
#include "support.hpp"

using namespace steerfid;
using steerfid::ref::max_abs;

namespace {

constexpr double kBellMixtureFs = 0.9330127018922193;

BipartiteSplit ab() { return {{"A"}, {"B"}}; }

}  // namespace

TEST(SdpSolver, TraceUnderIdentityBound) {
  // max Tr X s.t. X <= I (2x2) as an LMI in the entries of X.
  LmiBuilder b;
  const std::size_t upper = b.add_block("upper", 2);
  const std::size_t psd = b.add_block("psd", 2);
  const int x00 = b.add_param();
  const int x11 = b.add_param();
  const int re = b.add_param();
  const int im = b.add_param();
  for (auto [blk, sign] : {std::pair{upper, -1.0}, std::pair{psd, 1.0}}) {
    b.add_entry(x00, blk, 0, 0, sign);
    b.add_entry(x11, blk, 1, 1, sign);
    b.add_hermitian(re, blk, 0, 1, sign);
    b.add_hermitian(im, blk, 0, 1, cplx(0.0, sign));
  }
  b.add_entry(LmiBuilder::kConstant, upper, 0, 0, 1.0);
  b.add_entry(LmiBuilder::kConstant, upper, 1, 1, 1.0);
  b.add_objective(x00, 1.0);
  b.add_objective(x11, 1.0);
  const auto r = b.solve();
  EXPECT_EQ(r.solution.status, SdpStatus::optimal);
  EXPECT_NEAR(r.value, 2.0, 1e-7);
  EXPECT_NEAR(r.params[static_cast<std::size_t>(re)], 0.0, 1e-6);
}

TEST(SdpSolver, EqualityEliminationAndWeakDuality) {
  // max x + y s.t. x + 2y = 1, x >= 0, y >= 0: optimum 1 at (1, 0).
  LmiBuilder b;
  const std::size_t blk = b.add_block("diag", 2);
  const int x = b.add_param();
  const int y = b.add_param();
  b.add_entry(x, blk, 0, 0, 1.0);
  b.add_entry(y, blk, 1, 1, 1.0);
  b.add_objective(x, 1.0);
  b.add_objective(y, 1.0);
  b.add_equality({{x, 1.0}, {y, 2.0}}, 1.0);
  const auto r = b.solve();
  EXPECT_EQ(r.solution.status, SdpStatus::optimal);
  EXPECT_NEAR(r.value, 1.0, 1e-7);
  EXPECT_NEAR(r.params[0] + 2.0 * r.params[1], 1.0, 1e-9);
  EXPECT_LT(std::abs(r.solution.primal_value - r.solution.dual_value), 1e-6);
  EXPECT_LT(r.solution.residuals.gap, 1e-7);
}

TEST(SdpSolver, RandomProblemsSatisfyWeakDuality) {
  // max <C, X> s.t. Tr X = 1: the top eigenvalue of C.
  CounterRng rng(1);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 2 + rng.below(5);
    const Matrix c = steerfid::ref::random_hermitian(n, rng).real().cast<cplx>();
    SdpProblem p;
    p.add_block("x", n);
    SparseSym trace;
    for (std::uint32_t i = 0; i < n; ++i) {
      trace.push_back({0, i, i, 1.0});
      for (std::uint32_t j = i; j < n; ++j) p.objective.push_back({0, i, j, c(i, j).real()});
    }
    p.constraints.push_back(trace);
    p.rhs.push_back(1.0);
    const SdpSolution s = solve(p);
    EXPECT_EQ(s.status, SdpStatus::optimal);
    EXPECT_NEAR(s.primal_value, eigh(c).values.maxCoeff(), 1e-6);
    EXPECT_LE(s.primal_value, s.dual_value + 1e-7);
  }
}

TEST(SdpSolver, RejectsOversizedAndMalformed) {
  SdpProblem p;
  p.add_block("x", 2000);
  EXPECT_THROW((void)solve(p), ConfigError);
  SdpProblem q;
  q.add_block("x", 2);
  q.objective.push_back({1, 0, 0, 1.0});
  EXPECT_THROW(q.validate(), ShapeError);
}

TEST(SdpSolver, WritesSdpaFormat) {
  SdpProblem p;
  p.add_block("x", 2);
  p.objective.push_back({0, 0, 0, 1.0});
  p.constraints.push_back({{0, 0, 0, 1.0}, {0, 1, 1, 1.0}});
  p.rhs.push_back(1.0);
  std::ostringstream os;
  write_sdpa(p, os);
  const std::string text = os.str();
  EXPECT_NE(text.find("1 = mDIM"), std::string::npos);
  EXPECT_NE(text.find("1 = nBLOCK"), std::string::npos);
  EXPECT_NE(text.find("0 1 1 1 "), std::string::npos);
  EXPECT_NE(text.find("1 1 2 2 "), std::string::npos);
}

TEST(FidelitySdp, MatchesExactAndClosedForm) {
  CounterRng rng(2);
  for (int t = 0; t < 10; ++t) {
    const Layout l({{"A", 2}});
    const DensityMatrix a = random_density_matrix(l, rng);
    const DensityMatrix b = random_density_matrix(l, rng);
    const double closed = steerfid::ref::qubit_fidelity(a.matrix(), b.matrix());
    EXPECT_NEAR(fidelity_exact(a, b), closed, 1e-10);
    EXPECT_NEAR(fidelity_sdp(a, b), closed, 1e-6);
  }
  for (int t = 0; t < 5; ++t) {
    const Layout l({{"A", 3}, {"B", 2}});
    const DensityMatrix a = random_density_matrix(l, rng, 2);
    const DensityMatrix b = random_density_matrix(l, rng);
    EXPECT_NEAR(fidelity_sdp(a, b), fidelity_exact(a, b), 1e-6);
  }
}

TEST(FidelitySdp, OrthogonalAndEqualStates) {
  const Layout l({{"A", 2}});
  const DensityMatrix zero(steerfid::ref::ket_bra(2, 0, 0), l);
  const DensityMatrix one(steerfid::ref::ket_bra(2, 1, 1), l);
  EXPECT_NEAR(fidelity_sdp(zero, one), 0.0, 1e-7);
  EXPECT_NEAR(fidelity_sdp(zero, zero), 1.0, 1e-7);
}

TEST(SymmetricBasis, SpansInvariantHermitianOperators) {
  for (auto [ds, dx, k] : {std::tuple<std::size_t, std::size_t, std::size_t>{1, 2, 2}, {2, 2, 2}, {1, 2, 3}, {2, 3, 2}}) {
    const auto basis = symmetric_hermitian_basis(ds, dx, k);
    std::size_t dk = 1;
    for (std::size_t i = 0; i < k; ++i) dk *= dx;
    const std::size_t n = ds * dk;
    Labels copies;
    std::vector<Subsystem> subs{{"S", ds}};
    for (std::size_t i = 0; i < k; ++i) {
      copies.push_back("X" + std::to_string(i + 1));
      subs.push_back({copies.back(), dx});
    }
    const Layout layout(subs);
    // Every element is Hermitian and invariant under permutations of the copies.
    for (const auto& e : basis) {
      Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      for (const auto& [r, c, v] : e.entries) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) += v;
      EXPECT_LT(max_abs(m - m.adjoint()), 1e-14);
      EXPECT_LT(max_abs(symmetrize_permutations(m, layout, copies) - m), 1e-13);
    }
    // Invariant Hermitian operators form a real space of dimension equal to the
    // complex dimension of invariant operators, which is the number of orbits
    // of (row, col) pairs under simultaneous digit permutations.
    std::set<std::vector<std::size_t>> orbits;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        const auto dr = layout.digits(r);
        const auto dc = layout.digits(c);
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t i = 0; i < k; ++i) pairs.emplace_back(dr[i + 1], dc[i + 1]);
        std::sort(pairs.begin(), pairs.end());
        std::vector<std::size_t> key{dr[0], dc[0]};
        for (auto [a, b] : pairs) {
          key.push_back(a);
          key.push_back(b);
        }
        orbits.insert(key);
      }
    }
    EXPECT_EQ(basis.size(), orbits.size());
  }
}

TEST(Benchmarks, BellMixtureAllExtensions) {
  const DensityMatrix rho = build_state(NamedStateSpec{});
  for (std::size_t k = 1; k <= 3; ++k) {
    const auto b1 = benchmark1(rho, ab(), k);
    const auto b2 = benchmark2(rho, ab(), k);
    EXPECT_EQ(b1.status, SdpStatus::optimal);
    EXPECT_EQ(b2.status, SdpStatus::optimal);
    EXPECT_NEAR(b1.value, kBellMixtureFs, 1e-5);
    EXPECT_NEAR(b2.value, kBellMixtureFs, 1e-5);
  }
}

TEST(Benchmarks, PureEntangledAndProductStates) {
  const DensityMatrix phi = DensityMatrix::from_pure(bell_state(0));
  EXPECT_NEAR(benchmark1(phi, ab(), 2).value, 0.5, 1e-5);
  EXPECT_NEAR(benchmark2(phi, ab(), 2).value, 0.5, 1e-5);
  CounterRng rng(3);
  const DensityMatrix prod = tensor(random_density_matrix(Layout({{"A", 2}}), rng),
                                    random_density_matrix(Layout({{"B", 2}}), rng));
  EXPECT_NEAR(benchmark1(prod, ab(), 2).value, 1.0, 1e-5);
  EXPECT_NEAR(benchmark2(prod, ab(), 2).value, 1.0, 1e-5);
}

TEST(Benchmarks, NonIncreasingInExtension) {
  CounterRng rng(4);
  const DensityMatrix rho = random_density_matrix(Layout({{"A", 2}, {"B", 2}}), rng, 2);
  double prev1 = 1.0 + 1e-6;
  double prev2 = 1.0 + 1e-6;
  for (std::size_t k = 1; k <= 3; ++k) {
    const double v1 = benchmark1(rho, ab(), k).value;
    const double v2 = benchmark2(rho, ab(), k).value;
    EXPECT_LE(v1, prev1 + 1e-6);
    EXPECT_LE(v2, prev2 + 1e-6);
    EXPECT_GE(v1, 0.0);
    EXPECT_GE(v2, 0.0);
    prev1 = v1;
    prev2 = v2;
  }
}

TEST(Benchmarks, RejectOutOfRangeExtensionAndSize) {
  const DensityMatrix rho = build_state(NamedStateSpec{});
  EXPECT_THROW((void)benchmark1(rho, ab(), 0), ConfigError);
  EXPECT_THROW((void)benchmark1(rho, ab(), 5), ConfigError);
  EXPECT_THROW((void)benchmark2(rho, ab(), 5), ConfigError);
  CounterRng rng(5);
  const DensityMatrix big = random_density_matrix(Layout({{"A", 4}, {"B", 8}}), rng);
  EXPECT_THROW((void)benchmark1(big, ab(), 4), ConfigError);
}

TEST(Benchmark2Objective, HermitianAndReplacementChannelValue) {
  const DensityMatrix rho = build_state(NamedStateSpec{});
  const SwapObjective obj = benchmark2_objective(rho, ab());
  EXPECT_LT(max_abs(obj.omega - obj.omega.adjoint()), 1e-14);
  ASSERT_EQ(obj.schmidt.size(), 2U);
  EXPECT_NEAR(obj.schmidt[0], 0.75, 1e-12);
  // Replacement channel to I/2: acceptance = 1/2 (1 + Tr[rho_A I/2]) = 3/4.
  const Matrix g = identity(obj.layout.total_dim()) / 2.0;
  EXPECT_NEAR((g * obj.omega).trace().real(), 0.75, 1e-12);
}

TEST(BoundGap, ExamplesAndVacuousRegime) {
  const FsBracket vac = bound_gap1(2, 2, 0.9);
  EXPECT_TRUE(vac.vacuous);
  EXPECT_NEAR(vac.upper, 0.9, 1e-15);
  EXPECT_EQ(vac.lower, 0.0);
  EXPECT_EQ(vac.benchmark_upper, 1.0);

  // d = 4/16 = 1/4, eps = 2 sqrt(3/16) = sqrt 3 / 2.
  const FsBracket b = bound_gap1(2, 16, 1.0);
  EXPECT_FALSE(b.vacuous);
  EXPECT_NEAR(b.lower, 1.0 - 0.75, 1e-12);
  EXPECT_NEAR(b.benchmark_upper, 1.0, 1e-12);
  const FsBracket c = bound_gap1(2, 16, 0.5);
  EXPECT_NEAR(c.lower, 0.0, 1e-15);
  EXPECT_NEAR(c.benchmark_upper, 1.0 - std::pow(std::max(0.0, std::sqrt(0.5) - std::sqrt(3.0) / 2.0), 2), 1e-12);
  EXPECT_LE(c.lower, c.upper);
}
