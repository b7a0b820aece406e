#pragma once

// Hardware-efficient ansatz, statevector evolution and computational-basis
// measurement with exact branch decomposition or shot sampling.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "steerfid/qcore.hpp"
#include "steerfid/rng.hpp"

namespace steerfid {

// Branches with probability below this are dropped from decompositions.
inline constexpr double kBranchCutoff = 1e-14;

// Layered ansatz: every layer applies Rx then Ry to each qubit, followed by
// the CNOT chain (q -> q+1, ascending) unless `entangling` is false.
// Parameters are laid out layer-major as [x_0, y_0, x_1, y_1, ...].
struct ParamCircuit {
  std::size_t n_qubits = 1;
  std::size_t layers = 1;
  bool entangling = true;

  [[nodiscard]] std::size_t num_params() const { return 2 * n_qubits * layers; }
};

[[nodiscard]] Matrix rx(double theta);
[[nodiscard]] Matrix ry(double theta);
// CNOT on `n_qubits` with qubit 0 the most significant.
[[nodiscard]] Matrix cnot(std::size_t n_qubits, std::size_t control, std::size_t target);

[[nodiscard]] Matrix hea_unitary(const ParamCircuit& circuit, std::span<const double> params);

// Number of qubits spanned by a dimension that must be a power of two.
[[nodiscard]] std::size_t qubit_count(std::size_t dim);

// (U on targets) (x) I elsewhere; U acts on the targets in layout order.
[[nodiscard]] PureState apply_to_subsystem(const PureState& state, const Matrix& u, const Labels& targets);

struct Branch {
  double prob = 0.0;
  std::size_t outcome = 0;  // composite index over the measured subsystems
  PureState post;           // normalized, on the unmeasured subsystems
};

[[nodiscard]] std::vector<Branch> measure_branches(const PureState& state, const Labels& measured);

struct Sample {
  std::size_t outcome = 0;
  PureState post;
};

[[nodiscard]] Sample sample_outcome(const PureState& state, const Labels& measured, CounterRng& rng);

// Outcome-indexed parameter vectors for the conditional circuits. Entries are
// created zero-initialized on first mutable access.
class OutcomeTable {
 public:
  explicit OutcomeTable(std::size_t params_per_outcome = 0) : width_(params_per_outcome), zeros_(width_, 0.0) {}

  [[nodiscard]] std::size_t width() const { return width_; }
  [[nodiscard]] std::size_t size() const { return table_.size(); }
  [[nodiscard]] bool contains(std::uint64_t outcome) const { return table_.count(outcome) != 0; }

  std::span<double> params_for(std::uint64_t outcome);
  // Zero vector for outcomes without an entry.
  [[nodiscard]] std::span<const double> params(std::uint64_t outcome) const;

  // Outcomes 0..n_outcomes-1 packed contiguously.
  static OutcomeTable from_joint(std::span<const double> joint, std::size_t n_outcomes, std::size_t width);
  [[nodiscard]] std::vector<double> to_joint(std::size_t n_outcomes) const;

 private:
  std::size_t width_;
  std::vector<double> zeros_;
  std::map<std::uint64_t, std::vector<double>> table_;
};

}  // namespace steerfid
