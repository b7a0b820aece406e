#pragma once

// Named test states, purification and the qubit depolarizing channel.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "steerfid/qcore.hpp"

namespace steerfid {

enum class StateKind { bell_mixture, ghz, depolarized_ghz4, hea_random, explicit_matrix };

struct NamedStateSpec {
  StateKind kind = StateKind::bell_mixture;

  // bell_mixture: weights over (Phi+, Phi-, Psi+, Psi-); missing entries are 0.
  std::vector<double> weights{0.75, 0.25};
  // ghz: number of qubit parties.
  std::size_t n_parties = 3;
  // depolarized_ghz4: depolarizing strength on A1 and A2.
  double p = 0.7;
  // hea_random: angles drawn uniformly in [0, 2pi) from `seed`.
  std::uint64_t seed = 0;
  std::size_t layers = 2;
  bool entangling = true;
  std::size_t n_a = 1;
  std::size_t n_b = 1;
  // explicit_matrix: the state itself.
  std::optional<DensityMatrix> matrix;

  // Optional relabelling; must have the dimensions of the built state.
  std::optional<Layout> layout;
};

// |Phi+>, |Phi->, |Psi+>, |Psi-> on qubits labelled a, b.
[[nodiscard]] PureState bell_state(int which, const std::string& a = "A", const std::string& b = "B");
// (|0...0> + |1...1>)/sqrt 2 on the given qubit labels.
[[nodiscard]] PureState ghz_state(const Labels& labels);

// |psi> = sum_i sqrt(lambda_i) |i>_R |e_i>, eigenvalues descending; the first
// nonzero amplitude of every eigenvector is made real positive.
[[nodiscard]] PureState purify(const DensityMatrix& rho, const std::string& ref_label, std::size_t ref_dim);
// Smallest power of two >= rank(rho).
[[nodiscard]] std::size_t default_ref_dim(const DensityMatrix& rho);

// (1-p) rho + p Tr_target(rho) (x) I/2 on a qubit subsystem.
[[nodiscard]] DensityMatrix depolarize(const DensityMatrix& rho, const std::string& target, double p);

[[nodiscard]] DensityMatrix build_state(const NamedStateSpec& spec);

// Natural party grouping of a named state, e.g. {{A1,A2},{B1,B2}}.
[[nodiscard]] std::vector<Labels> default_partitions(const NamedStateSpec& spec);

// Parses the short names accepted on the command line:
//   bell_mixture[:w0,w1,w2,w3]  ghz[:n]  depolarized_ghz4[:p]
//   hea_random[:seed,layers,entangling,nA,nB]  product (= hea_random without CNOTs)
[[nodiscard]] NamedStateSpec parse_state_name(const std::string& name);

// State JSON: {"layout":[["A",2],...],"matrix":[[[re,im],...],...]}.
[[nodiscard]] DensityMatrix state_from_json(const std::string& text);
[[nodiscard]] DensityMatrix load_state_file(const std::string& path);
[[nodiscard]] std::string state_to_json(const DensityMatrix& rho);

}  // namespace steerfid
