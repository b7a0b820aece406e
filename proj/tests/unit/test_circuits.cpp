#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "steerfid/circuits.hpp"
#include "steerfid/errors.hpp"
#include "steerfid/random_states.hpp"
#include "steerfid/states.hpp"
#include "support.hpp"

using namespace steerfid;
using steerfid::ref::max_abs;

namespace {

std::vector<double> random_angles(std::size_t n, CounterRng& rng) {
  std::vector<double> out(n);
  for (auto& a : out) a = 6.283185307179586 * rng.uniform();
  return out;
}

}  // namespace

TEST(Hea, ZeroAnglesGiveIdentityOrEntangler) {
  const ParamCircuit flat{3, 2, false};
  EXPECT_EQ(flat.num_params(), 12U);
  EXPECT_LT(max_abs(hea_unitary(flat, std::vector<double>(12, 0.0)) - identity(8)), 1e-15);

  const ParamCircuit one{2, 1, true};
  Matrix cx = Matrix::Zero(4, 4);
  cx(0, 0) = cx(1, 1) = 1.0;
  cx(2, 3) = cx(3, 2) = 1.0;
  EXPECT_LT(max_abs(hea_unitary(one, std::vector<double>(4, 0.0)) - cx), 1e-15);
  EXPECT_LT(max_abs(cnot(2, 0, 1) - cx), 1e-15);
}

TEST(Hea, UnitaryAndLengthChecked) {
  CounterRng rng(3);
  const ParamCircuit c{3, 3, true};
  const Matrix u = hea_unitary(c, random_angles(c.num_params(), rng));
  EXPECT_LT(max_abs(u.adjoint() * u - identity(8)), 1e-12);
  EXPECT_THROW((void)hea_unitary(c, std::vector<double>(5, 0.0)), ShapeError);
}

TEST(Hea, RotationOrderIsRxThenRy) {
  // One qubit, one layer: U = Ry(y) Rx(x).
  const ParamCircuit c{1, 1, false};
  const std::vector<double> p{0.3, 1.1};
  EXPECT_LT(max_abs(hea_unitary(c, p) - ry(1.1) * rx(0.3)), 1e-15);
}

TEST(Hea, WithoutEntanglersFactorizes) {
  CounterRng rng(5);
  const ParamCircuit c{2, 3, false};
  const Matrix u = hea_unitary(c, random_angles(c.num_params(), rng));
  // A product u = a (x) b has operator-Schmidt rank one: the realigned
  // 4x4 matrix R[(i,j),(k,l)] = u[(i,k),(j,l)] has a single nonzero singular value.
  Matrix realigned(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) realigned(i * 2 + j, k * 2 + l) = u(i * 2 + k, j * 2 + l);
  const Eigen::JacobiSVD<Matrix> svd(realigned);
  EXPECT_LT(svd.singularValues()(1), 1e-12);
}

TEST(ApplyToSubsystem, IdentitySwapAndNorm) {
  CounterRng rng(7);
  const Layout l({{"A", 2}, {"B", 2}, {"C", 3}});
  const PureState psi = random_pure_state(l, rng);
  EXPECT_LT((apply_to_subsystem(psi, identity(4), {"A", "B"}).amplitudes() - psi.amplitudes()).norm(), 1e-15);

  const PureState swapped = apply_to_subsystem(psi, swap_operator(2), {"A", "B"});
  const PureState expected = permute_subsystems(psi, {"B", "A", "C"});
  EXPECT_LT((swapped.amplitudes() - expected.amplitudes()).norm(), 1e-14);

  const Matrix u = random_unitary(3, rng);
  EXPECT_NEAR(apply_to_subsystem(psi, u, {"C"}).amplitudes().norm(), 1.0, 1e-12);
  const Matrix dense = tensor(identity(4), u);
  EXPECT_LT((apply_to_subsystem(psi, u, {"C"}).amplitudes() - dense * psi.amplitudes()).norm(), 1e-12);
  EXPECT_THROW((void)apply_to_subsystem(psi, identity(2), {"C"}), ShapeError);
}

TEST(MeasureBranches, ProductReferenceGivesOneBranch) {
  CounterRng rng(9);
  const PureState phi = random_pure_state(Layout({{"A", 2}, {"B", 2}}), rng);
  const PureState psi = tensor(PureState::basis(Layout({{"R", 2}}), 0), phi);
  const auto branches = measure_branches(psi, {"R"});
  ASSERT_EQ(branches.size(), 1U);
  EXPECT_NEAR(branches[0].prob, 1.0, 1e-14);
  EXPECT_EQ(branches[0].outcome, 0U);
  EXPECT_NEAR(std::abs(branches[0].post.amplitudes().dot(phi.amplitudes())), 1.0, 1e-12);
}

TEST(MeasureBranches, BellMixturePurificationProbabilities) {
  const PureState psi = purify(build_state(NamedStateSpec{}), "R", 4);
  const auto branches = measure_branches(psi, {"R"});
  ASSERT_EQ(branches.size(), 2U);
  EXPECT_NEAR(branches[0].prob, 0.75, 1e-14);
  EXPECT_NEAR(branches[1].prob, 0.25, 1e-14);
}

TEST(MeasureBranches, SteeringIdentityReconstructsReducedState) {
  CounterRng rng(11);
  const Layout l({{"R", 4}, {"A", 2}, {"B", 2}});
  for (int i = 0; i < 20; ++i) {
    const PureState psi = random_pure_state(l, rng);
    Matrix sum = Matrix::Zero(4, 4);
    double total = 0.0;
    for (const auto& b : measure_branches(psi, {"R"})) {
      sum += b.prob * b.post.projector();
      total += b.prob;
      EXPECT_NEAR(b.post.amplitudes().norm(), 1.0, 1e-12);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_LT(max_abs(sum - reduced_state(psi, {"A", "B"}).matrix()), 1e-12);
  }
}

TEST(MeasureBranches, CommutesWithUnitaryOnDisjointSubsystem) {
  CounterRng rng(13);
  const PureState psi = random_pure_state(Layout({{"R", 2}, {"A", 2}, {"B", 2}}), rng);
  const Matrix u = random_unitary(2, rng);
  const auto before = measure_branches(apply_to_subsystem(psi, u, {"A"}), {"R"});
  const auto after = measure_branches(psi, {"R"});
  ASSERT_EQ(before.size(), after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    EXPECT_NEAR(before[i].prob, after[i].prob, 1e-12);
    const PureState rotated = apply_to_subsystem(after[i].post, u, {"A"});
    EXPECT_LT(max_abs(rotated.projector() - before[i].post.projector()), 1e-12);
  }
}

TEST(SampleOutcome, DeterministicBranchAndReproducibility) {
  const PureState psi = tensor(PureState::basis(Layout({{"R", 2}}), 1), PureState::basis(Layout({{"A", 2}}), 0));
  CounterRng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_outcome(psi, {"R"}, rng).outcome, 1U);

  CounterRng r1(5);
  CounterRng r2(5);
  const PureState mixed = purify(build_state(NamedStateSpec{}), "R", 2);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_outcome(mixed, {"R"}, r1).outcome, sample_outcome(mixed, {"R"}, r2).outcome);
}

TEST(SampleOutcome, FrequenciesMatchBranchProbabilities) {
  CounterRng rng(17);
  const PureState psi = random_pure_state(Layout({{"R", 4}, {"A", 2}}), rng);
  const auto branches = measure_branches(psi, {"R"});
  std::map<std::size_t, std::size_t> counts;
  const std::size_t shots = 100000;
  for (std::size_t s = 0; s < shots; ++s) ++counts[sample_outcome(psi, {"R"}, rng).outcome];
  double chi2 = 0.0;
  for (const auto& b : branches) {
    const double expected = b.prob * static_cast<double>(shots);
    const double sigma = std::sqrt(static_cast<double>(shots) * b.prob * (1.0 - b.prob));
    const auto observed = static_cast<double>(counts[b.outcome]);
    EXPECT_LT(std::abs(observed - expected), 5.0 * sigma);
    chi2 += (observed - expected) * (observed - expected) / expected;
  }
  // 3 degrees of freedom: the 1e-3 upper critical value is 16.27.
  EXPECT_LT(chi2, 16.27);
}

TEST(OutcomeTable, ZeroDefaultsAndJointRoundTrip) {
  OutcomeTable t(3);
  EXPECT_FALSE(t.contains(2));
  EXPECT_EQ(t.params(2).size(), 3U);
  EXPECT_EQ(t.params(2)[0], 0.0);
  t.params_for(2)[1] = 0.5;
  EXPECT_TRUE(t.contains(2));
  const auto joint = t.to_joint(4);
  ASSERT_EQ(joint.size(), 12U);
  EXPECT_EQ(joint[7], 0.5);
  const OutcomeTable back = OutcomeTable::from_joint(joint, 4, 3);
  EXPECT_EQ(back.params(2)[1], 0.5);
}
