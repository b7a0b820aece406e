#pragma once

// Independent reference implementations used as test oracles. They work on
// explicit digit loops and never call the library's partial operations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "steerfid/qcore.hpp"
#include "steerfid/random_states.hpp"
#include "steerfid/rng.hpp"

namespace steerfid::ref {

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Kronecker product by the definition (a ⊗ b)(i k, j l) = a(i, j) b(k, l).
inline Matrix naive_kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// Tr_second of an operator on (d1 x d2).
inline Matrix naive_trace_second(const Matrix& m, std::size_t d1, std::size_t d2) {
  const auto n1 = static_cast<Eigen::Index>(d1);
  const auto n2 = static_cast<Eigen::Index>(d2);
  Matrix out = Matrix::Zero(n1, n1);
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index j = 0; j < n1; ++j)
      for (Eigen::Index k = 0; k < n2; ++k) out(i, j) += m(i * n2 + k, j * n2 + k);
  return out;
}

// Tr_first of an operator on (d1 x d2).
inline Matrix naive_trace_first(const Matrix& m, std::size_t d1, std::size_t d2) {
  const auto n1 = static_cast<Eigen::Index>(d1);
  const auto n2 = static_cast<Eigen::Index>(d2);
  Matrix out = Matrix::Zero(n2, n2);
  for (Eigen::Index i = 0; i < n2; ++i)
    for (Eigen::Index j = 0; j < n2; ++j)
      for (Eigen::Index k = 0; k < n1; ++k) out(i, j) += m(k * n2 + i, k * n2 + j);
  return out;
}

// Transpose of the second factor of an operator on (d1 x d2).
inline Matrix naive_transpose_second(const Matrix& m, std::size_t d1, std::size_t d2) {
  const auto n1 = static_cast<Eigen::Index>(d1);
  const auto n2 = static_cast<Eigen::Index>(d2);
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index k = 0; k < n2; ++k)
      for (Eigen::Index j = 0; j < n1; ++j)
        for (Eigen::Index l = 0; l < n2; ++l) out(i * n2 + k, j * n2 + l) = m(i * n2 + l, j * n2 + k);
  return out;
}

// Uhlmann fidelity of two qubit states from the closed form
// F = Tr(rho sigma) + 2 sqrt(det rho det sigma).
inline double qubit_fidelity(const Matrix& rho, const Matrix& sigma) {
  const double tr = (rho * sigma).trace().real();
  const double d = std::max(0.0, rho.determinant().real()) * std::max(0.0, sigma.determinant().real());
  return tr + 2.0 * std::sqrt(d);
}

inline Matrix random_hermitian(std::size_t d, CounterRng& rng) {
  const Matrix g = ginibre(d, d, rng);
  return (g + g.adjoint()) / 2.0;
}

inline Matrix pauli_x() {
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

inline Matrix ket_bra(std::size_t d, std::size_t i, std::size_t j) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
  return m;
}

}  // namespace steerfid::ref
