#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "steerfid/benchmarks.hpp"
#include "steerfid/errors.hpp"
#include "steerfid/oracle.hpp"
#include "steerfid/random_states.hpp"
#include "steerfid/states.hpp"
#include "support.hpp"

using namespace steerfid;

namespace {

const std::vector<Labels> kAB{{"A"}, {"B"}};

// Largest Schmidt coefficient squared of a bipartite vector, by SVD.
double top_schmidt(const Vector& psi, std::size_t da, std::size_t db) {
  Matrix m(static_cast<Eigen::Index>(da), static_cast<Eigen::Index>(db));
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < db; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = psi(static_cast<Eigen::Index>(i * db + j));
  const double s = Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
  return s * s;
}

}  // namespace

TEST(ProductOverlap, BipartiteMatchesSchmidt) {
  CounterRng rng(1);
  for (int i = 0; i < 20; ++i) {
    const Vector psi = random_pure_state(Layout({{"A", 3}, {"B", 4}}), rng).amplitudes();
    const ProductOverlap p = product_overlap(psi, {3, 4});
    EXPECT_NEAR(p.value, top_schmidt(psi, 3, 4), 1e-10);
    ASSERT_EQ(p.factors.size(), 2U);
    const double direct = std::norm(tensor(p.factors[0], p.factors[1]).dot(psi));
    EXPECT_NEAR(direct, p.value, 1e-10);
  }
}

TEST(ProductOverlap, TripartiteExamples) {
  EXPECT_NEAR(product_overlap(ghz_state({"A", "B", "C"}).amplitudes(), {2, 2, 2}).value, 0.5, 1e-9);
  // W state: best product overlap 4/9.
  Vector w = Vector::Zero(8);
  w(1) = w(2) = w(4) = 1.0 / std::sqrt(3.0);
  EXPECT_NEAR(product_overlap(w, {2, 2, 2}).value, 4.0 / 9.0, 1e-8);
  EXPECT_THROW((void)product_overlap(w, {2, 2}), ShapeError);
}

TEST(FsPure, ExamplesAndLocalUnitaryInvariance) {
  EXPECT_NEAR(fs_pure(bell_state(0), kAB), 0.5, 1e-10);
  EXPECT_NEAR(fs_pure(PureState::basis(Layout({{"A", 2}, {"B", 2}}), 3), kAB), 1.0, 1e-12);
  EXPECT_NEAR(fs_pure(ghz_state({"A1", "A2", "A3"}), {{"A1"}, {"A2"}, {"A3"}}), 0.5, 1e-9);
  CounterRng rng(2);
  const PureState psi = random_pure_state(Layout({{"A", 2}, {"B", 2}, {"C", 2}}), rng);
  const std::vector<Labels> parts{{"A"}, {"B"}, {"C"}};
  const double base = fs_pure(psi, parts);
  PureState rotated = psi;
  for (const auto& l : {"A", "B", "C"}) {
    rotated = PureState(tensor(tensor(l == std::string("A") ? random_unitary(2, rng) : identity(2),
                                      l == std::string("B") ? random_unitary(2, rng) : identity(2)),
                               l == std::string("C") ? random_unitary(2, rng) : identity(2)) *
                            rotated.amplitudes(),
                        rotated.layout());
  }
  EXPECT_NEAR(fs_pure(rotated, parts), base, 1e-8);
}

TEST(Bruteforce, KnownValues) {
  EXPECT_NEAR(fs_bruteforce(build_state(NamedStateSpec{}), kAB), (2.0 + std::sqrt(3.0)) / 4.0, 1e-8);
  EXPECT_NEAR(fs_bruteforce(DensityMatrix::from_pure(bell_state(0)), kAB), 0.5, 1e-9);
  NamedStateSpec ghz;
  ghz.kind = StateKind::ghz;
  ghz.n_parties = 3;
  EXPECT_NEAR(fs_bruteforce(build_state(ghz), default_partitions(ghz)), 0.5, 1e-8);
  // Equal Bell mixture of Phi+ and Phi- is separable.
  EXPECT_NEAR(fs_bruteforce(build_state(parse_state_name("bell_mixture:0.5,0.5")), kAB), 1.0, 1e-8);
}

TEST(Bruteforce, PureInputMatchesPureOracle) {
  CounterRng rng(3);
  for (int i = 0; i < 5; ++i) {
    const PureState psi = random_pure_state(Layout({{"A", 2}, {"B", 3}}), rng);
    EXPECT_NEAR(fs_bruteforce(DensityMatrix::from_pure(psi), kAB), fs_pure(psi, kAB), 1e-8);
  }
}

TEST(Bruteforce, SeparableMixturesReachOne) {
  CounterRng rng(4);
  for (int i = 0; i < 5; ++i) {
    Matrix rho = Matrix::Zero(4, 4);
    for (int t = 0; t < 3; ++t) {
      const Vector a = random_pure_state(Layout({{"A", 2}}), rng).amplitudes();
      const Vector b = random_pure_state(Layout({{"B", 2}}), rng).amplitudes();
      const Vector ab = tensor(a, b);
      rho += ab * ab.adjoint() / 3.0;
    }
    EXPECT_NEAR(fs_bruteforce(DensityMatrix(rho, Layout({{"A", 2}, {"B", 2}})), kAB), 1.0, 1e-7);
  }
}

TEST(Bruteforce, BracketedByFidelityAndBenchmark) {
  CounterRng rng(5);
  for (int i = 0; i < 4; ++i) {
    const DensityMatrix rho = random_density_matrix(Layout({{"A", 2}, {"B", 2}}), rng, 2);
    const OracleReport report = fs_bruteforce_report(rho, kAB);
    EXPECT_LE(report.value, benchmark1(rho, {{"A"}, {"B"}}, 2).value + 1e-6);
    EXPECT_LE(report.value, 1.0 + 1e-12);
    // The decomposition yields a separable witness: with squared branch
    // overlaps a_x, sigma = sum_x q_x phi_x, q_x ~ p_x a_x, attains
    // F(rho, sigma) = sum_x p_x a_x. Eigenvector phases follow purify().
    HermitianEigen eig = eigh(rho.matrix());
    const auto n = eig.values.size();
    for (Eigen::Index c = 0; c < n; ++c) {
      for (Eigen::Index r = 0; r < n; ++r) {
        if (std::abs(eig.vectors(r, c)) > 1e-12) {
          eig.vectors.col(c) *= std::conj(eig.vectors(r, c)) / std::abs(eig.vectors(r, c));
          break;
        }
      }
    }
    std::vector<double> q;
    double norm = 0.0;
    std::vector<Vector> phis;
    for (std::size_t x = 0; x < report.factors.size(); ++x) {
      Vector branch = Vector::Zero(4);
      for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(report.rank); ++i) {
        branch += report.isometry(static_cast<Eigen::Index>(x), i) * std::sqrt(std::max(0.0, eig.values(n - 1 - i))) *
                  eig.vectors.col(n - 1 - i);
      }
      const Vector phi = tensor(report.factors[x][0], report.factors[x][1]);
      q.push_back(std::norm(phi.dot(branch)));  // p_x a_x
      norm += q.back();
      phis.push_back(phi);
    }
    EXPECT_NEAR(norm, report.value, 1e-8);
    Matrix sigma = Matrix::Zero(4, 4);
    for (std::size_t x = 0; x < q.size(); ++x) sigma += q[x] / norm * phis[x] * phis[x].adjoint();
    EXPECT_GE(fidelity_exact(rho.matrix(), sigma), report.value - 1e-7);
    double total = 0.0;
    for (double p : report.branch_probs) total += p;
    EXPECT_NEAR(total, 1.0, 1e-10);
    const Matrix& v = report.isometry;
    EXPECT_LT(steerfid::ref::max_abs(v.adjoint() * v - identity(static_cast<std::size_t>(v.cols()))), 1e-10);
  }
}

TEST(Bruteforce, DeterministicAndConfigChecked) {
  CounterRng rng(6);
  const DensityMatrix rho = random_density_matrix(Layout({{"A", 2}, {"B", 2}}), rng, 3);
  OracleConfig cfg;
  cfg.restarts = 4;
  cfg.seed = 9;
  EXPECT_EQ(fs_bruteforce_report(rho, kAB, cfg).restart_values, fs_bruteforce_report(rho, kAB, cfg).restart_values);
  cfg.restarts = 0;
  EXPECT_THROW((void)fs_bruteforce(rho, kAB, cfg), ConfigError);
  const DensityMatrix big = random_density_matrix(Layout({{"A", 4}, {"B", 8}}), rng);
  EXPECT_THROW((void)fs_bruteforce(big, kAB), ConfigError);
}
