#pragma once

// Brute-force fidelity of separability for small states. Values are lower
// bounds found by multi-restart local ascent; the SDP benchmarks give the
// matching upper side.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "steerfid/qcore.hpp"
#include "steerfid/rng.hpp"
#include "steerfid/vqsa.hpp"

namespace steerfid {

// Largest total dimension accepted by fs_bruteforce.
inline constexpr std::size_t kMaxOracleDim = 16;

struct OracleConfig {
  std::size_t restarts = 20;
  double inner_tol = 1e-12;
  std::size_t max_inner_iter = 2000;
  // Number of decomposition branches; 0 = rank(rho)^2.
  std::size_t decomposition_dim = 0;
  std::uint64_t seed = 0;

  // Throws ConfigError on restarts == 0 or a non-positive tolerance.
  void validate() const;
};

// Best product approximation of a pure state over the given party dims.
struct ProductOverlap {
  double value = 0.0;  // |<phi_1 ... phi_m|psi>|^2
  std::vector<Vector> factors;
};

// Exact for two parties (top singular pair); alternating ascent with restarts
// otherwise. `psi` is indexed with the first party most significant.
ProductOverlap product_overlap(const Vector& psi, const std::vector<std::size_t>& dims, const OracleConfig& cfg = {});

// Maximum squared overlap of psi with a product over the partitions.
double fs_pure(const PureState& psi, const std::vector<Labels>& partitions, const OracleConfig& cfg = {});

struct OracleReport {
  double value = 0.0;
  std::vector<double> restart_values;
  std::size_t rank = 0;
  // Decomposition isometry V (branches x rank): branch x is
  // sum_i V(x, i) sqrt(lambda_i) |e_i>, eigenvalues descending as in purify().
  Matrix isometry;
  std::vector<double> branch_probs;
  // Per branch, the best product factor of every partition.
  std::vector<std::vector<Vector>> factors;
};

OracleReport fs_bruteforce_report(const DensityMatrix& rho, const std::vector<Labels>& partitions,
                                  const OracleConfig& cfg = {});
double fs_bruteforce(const DensityMatrix& rho, const std::vector<Labels>& partitions, const OracleConfig& cfg = {});

// Measure-and-prepare channel realizing the reported decomposition: POVM
// elements V(x)^dagger V(x) on a reference of dimension rank, preparations
// from the factors of every partition but the last.
EbChannelSpec eb_from_report(const OracleReport& report);

}  // namespace steerfid
