#pragma once

// SDP upper bounds on the fidelity of separability: a PPT k-extendible
// relaxation of the separable set (benchmark1) and a PPT k-extendible
// relaxation of entanglement-breaking channels in the swap test (benchmark2).

#include <cstddef>
#include <tuple>
#include <vector>

#include "steerfid/qcore.hpp"
#include "steerfid/sdp.hpp"

namespace steerfid {

struct BipartiteSplit {
  Labels a;
  Labels b;
};

// Sum of complex block dimensions accepted by the benchmark builders.
inline constexpr std::size_t kMaxBenchmarkDim = 512;
inline constexpr std::size_t kMaxExtension = 4;

struct BenchmarkResult {
  double value = 0.0;  // the benchmark (squared root fidelity or 2 opt - 1)
  double optimum = 0.0;  // raw SDP optimum
  std::size_t k = 0;
  SdpStatus status = SdpStatus::numerical_failure;
  SdpResiduals residuals;
  std::size_t iterations = 0;
  std::size_t num_params = 0;
  std::size_t complex_dim = 0;
};

// Uhlmann fidelity via max Re Tr X s.t. [[rho, X], [X^dagger, sigma]] >= 0,
// after compressing both states to their supports. Throws SolverError unless
// the solve is optimal.
double fidelity_sdp(const DensityMatrix& rho, const DensityMatrix& sigma, const SdpOptions& options = {});
BenchmarkResult fidelity_sdp_detail(const DensityMatrix& rho, const DensityMatrix& sigma,
                                    const SdpOptions& options = {});

BenchmarkResult benchmark1(const DensityMatrix& rho, const BipartiteSplit& split, std::size_t k,
                           const SdpOptions& options = {});
BenchmarkResult benchmark2(const DensityMatrix& rho, const BipartiteSplit& split, std::size_t k,
                           const SdpOptions& options = {});

// Linear objective of benchmark2 as an operator on [R, A'] (R of dimension
// rank(rho)): the acceptance of a channel with Choi operator G is Tr[G Omega].
struct SwapObjective {
  Matrix omega;
  Layout layout;  // [R, A']
  std::vector<double> schmidt;  // eigenvalues of rho used for R, descending
  Matrix vectors;               // matching eigenvectors (columns), on [A, B]
};
SwapObjective benchmark2_objective(const DensityMatrix& rho, const BipartiteSplit& split);

// Bracket on F_s implied by a benchmark1 value v at extension k:
// F_s <= v and sqrt(1 - F_s) <= sqrt(1 - v) + 2 sqrt(d (1 - d)), d = |B|^2 / k.
// For d >= 1 the second inequality carries no information.
struct FsBracket {
  double lower = 0.0;
  double upper = 1.0;
  bool vacuous = false;
  // Largest benchmark1 value compatible with F_s = v (1 when vacuous).
  double benchmark_upper = 1.0;
};
FsBracket bound_gap1(std::size_t dim_b, std::size_t k, double value);

// Hermitian basis of operators on S (x) X^k invariant under permutations of
// the k copies of X. Each element is a list of (row, col, value) entries
// covering both triangles.
struct HermitianBasisElement {
  std::vector<std::tuple<std::size_t, std::size_t, cplx>> entries;
};
std::vector<HermitianBasisElement> symmetric_hermitian_basis(std::size_t dim_s, std::size_t dim_x, std::size_t k);

}  // namespace steerfid
