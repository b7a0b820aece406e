#pragma once

// Dense complex linear algebra and quantum-information primitives.
//
// Index convention: the first Layout entry is the most significant digit of a
// composite basis index, i.e. index = sum_j digit_j * stride_j with
// stride_j = prod_{l > j} dim_l. Every partial operation in the library and
// every file format use this convention.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace steerfid {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Labels = std::vector<std::string>;

// Hermiticity / positivity / normalization tolerance for state invariants.
inline constexpr double kStateTolerance = 1e-10;
// Eigenvalues above -kClipTolerance are clipped to zero before square roots.
inline constexpr double kClipTolerance = 1e-10;
// Largest total Hilbert-space dimension handled by the dense kernels.
inline constexpr std::size_t kMaxTotalDim = 256;

struct Subsystem {
  std::string label;
  std::size_t dim = 1;

  bool operator==(const Subsystem&) const = default;
};

// Ordered list of labelled subsystems.
class Layout {
 public:
  Layout() = default;
  Layout(std::initializer_list<Subsystem> subsystems);
  explicit Layout(std::vector<Subsystem> subsystems);

  // n qubit subsystems with the given labels.
  static Layout qubits(const Labels& labels);

  [[nodiscard]] std::size_t size() const { return subsystems_.size(); }
  [[nodiscard]] bool empty() const { return subsystems_.empty(); }
  [[nodiscard]] std::size_t total_dim() const { return total_dim_; }
  [[nodiscard]] const Subsystem& at(std::size_t position) const { return subsystems_.at(position); }
  [[nodiscard]] const std::vector<Subsystem>& subsystems() const { return subsystems_; }
  [[nodiscard]] std::size_t stride(std::size_t position) const { return strides_.at(position); }

  [[nodiscard]] bool contains(const std::string& label) const;
  // Throws AddressingError for unknown labels.
  [[nodiscard]] std::size_t position_of(const std::string& label) const;
  [[nodiscard]] std::size_t dim_of(const std::string& label) const;
  // Product of the dims of the given labels.
  [[nodiscard]] std::size_t dim_of(const Labels& labels) const;
  [[nodiscard]] Labels labels() const;

  // Positions of the given labels sorted into layout order; validates labels
  // and rejects duplicates.
  [[nodiscard]] std::vector<std::size_t> positions(const Labels& labels) const;
  // Sub-layout holding `labels` in layout order.
  [[nodiscard]] Layout select(const Labels& labels) const;
  // Sub-layout with `labels` removed.
  [[nodiscard]] Layout without(const Labels& labels) const;
  [[nodiscard]] Layout concat(const Layout& other) const;
  // Layout reordered to `order` (a permutation of all labels).
  [[nodiscard]] Layout reordered(const Labels& order) const;

  [[nodiscard]] std::vector<std::size_t> digits(std::size_t index) const;
  [[nodiscard]] std::string to_string() const;

  bool operator==(const Layout& other) const { return subsystems_ == other.subsystems_; }

 private:
  void finalize();

  std::vector<Subsystem> subsystems_;
  std::vector<std::size_t> strides_;
  std::size_t total_dim_ = 1;
};

// Bijection between a composite index and the pair (selected, rest), where
// both parts are composite indices over their subsystems in layout order.
class IndexSplit {
 public:
  IndexSplit(const Layout& layout, const Labels& selected);

  [[nodiscard]] std::size_t selected_dim() const { return selected_offset_.size(); }
  [[nodiscard]] std::size_t rest_dim() const { return rest_offset_.size(); }
  [[nodiscard]] std::size_t compose(std::size_t selected, std::size_t rest) const {
    return selected_offset_[selected] + rest_offset_[rest];
  }
  [[nodiscard]] std::size_t selected_of(std::size_t full) const { return selected_of_[full]; }
  [[nodiscard]] std::size_t rest_of(std::size_t full) const { return rest_of_[full]; }

 private:
  std::vector<std::size_t> selected_offset_;
  std::vector<std::size_t> rest_offset_;
  std::vector<std::size_t> selected_of_;
  std::vector<std::size_t> rest_of_;
};

class PureState;

// Hermitian, positive semidefinite, unit-trace operator on a layout.
class DensityMatrix {
 public:
  // Validates the invariants within kStateTolerance (ConfigError otherwise)
  // and stores the Hermitian part.
  DensityMatrix(Matrix mat, Layout layout);

  static DensityMatrix from_pure(const PureState& psi);

  [[nodiscard]] const Matrix& matrix() const { return mat_; }
  [[nodiscard]] const Layout& layout() const { return layout_; }
  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }

 private:
  Matrix mat_;
  Layout layout_;
};

// Unit vector on a layout.
class PureState {
 public:
  PureState(Vector amplitudes, Layout layout);

  // Computational basis vector |index>.
  static PureState basis(Layout layout, std::size_t index);

  [[nodiscard]] const Vector& amplitudes() const { return amps_; }
  [[nodiscard]] const Layout& layout() const { return layout_; }
  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  [[nodiscard]] Matrix projector() const { return amps_ * amps_.adjoint(); }

 private:
  Vector amps_;
  Layout layout_;
};

// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
struct HermitianEigen {
  RealVector values;
  Matrix vectors;
};

HermitianEigen eigh(const Matrix& hermitian);

[[nodiscard]] bool is_hermitian(const Matrix& m, double tol = kStateTolerance);
[[nodiscard]] Matrix hermitian_part(const Matrix& m);
// Square root of a PSD matrix with eigenvalues >= -kClipTolerance clipped.
[[nodiscard]] Matrix psd_sqrt(const Matrix& psd);
// Number of eigenvalues above `cutoff`.
[[nodiscard]] std::size_t numerical_rank(const Matrix& hermitian, double cutoff = 1e-12);

// Kronecker products; layouts are concatenated.
[[nodiscard]] Matrix tensor(const Matrix& a, const Matrix& b);
[[nodiscard]] Vector tensor(const Vector& a, const Vector& b);
[[nodiscard]] DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
[[nodiscard]] PureState tensor(const PureState& a, const PureState& b);

// Reduced matrix on `keep`, subsystems in layout order.
[[nodiscard]] Matrix partial_trace(const Matrix& m, const Layout& layout, const Labels& keep);
[[nodiscard]] DensityMatrix partial_trace(const DensityMatrix& rho, const Labels& keep);
// Reduced state of a pure state, computed without forming the projector.
[[nodiscard]] DensityMatrix reduced_state(const PureState& psi, const Labels& keep);

// Transpose on the digits of the `transposed` subsystems only.
[[nodiscard]] Matrix partial_transpose(const Matrix& m, const Layout& layout, const Labels& transposed);

// Reorders tensor factors: result acts on layout.reordered(order).
[[nodiscard]] Matrix permute_subsystems(const Matrix& m, const Layout& layout, const Labels& order);
[[nodiscard]] Vector permute_subsystems(const Vector& v, const Layout& layout, const Labels& order);
[[nodiscard]] PureState permute_subsystems(const PureState& psi, const Labels& order);

// d^2 x d^2 swap F|i>|j> = |j>|i>.
[[nodiscard]] Matrix swap_operator(std::size_t d);
// (I + F) / 2.
[[nodiscard]] Matrix symmetric_projector(std::size_t d);

// Group average of P m P^dagger over all permutations P of the equal-dimension
// subsystems in `group` (|group| <= 5).
[[nodiscard]] Matrix symmetrize_permutations(const Matrix& m, const Layout& layout, const Labels& group);

// Largest singular value (largest |eigenvalue| for Hermitian input).
[[nodiscard]] double spectral_norm(const Matrix& m);
// Uhlmann fidelity ||sqrt(rho) sqrt(sigma)||_1^2.
[[nodiscard]] double fidelity_exact(const DensityMatrix& rho, const DensityMatrix& sigma);
[[nodiscard]] double fidelity_exact(const Matrix& rho, const Matrix& sigma);

// Identity on `d` dimensions.
[[nodiscard]] inline Matrix identity(std::size_t d) {
  return Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

}  // namespace steerfid
