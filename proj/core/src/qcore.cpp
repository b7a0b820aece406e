#include "steerfid/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "steerfid/errors.hpp"

namespace steerfid {

namespace {

void check_square(const Matrix& m, const Layout& layout, const char* op) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != layout.total_dim()) {
    throw ShapeError(std::string(op) + ": matrix is " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + " but layout " + layout.to_string() + " has dimension " +
                     std::to_string(layout.total_dim()));
  }
}

// Index map of the subsystem permutation taking `layout` to layout.reordered(order):
// result[old_index] = new_index.
std::vector<std::size_t> reorder_map(const Layout& layout, const Labels& order) {
  const Layout target = layout.reordered(order);
  std::vector<std::size_t> new_stride_of_old(layout.size());
  for (std::size_t j = 0; j < layout.size(); ++j) {
    new_stride_of_old[j] = target.stride(target.position_of(layout.at(j).label));
  }
  std::vector<std::size_t> map(layout.total_dim());
  for (std::size_t i = 0; i < layout.total_dim(); ++i) {
    const auto d = layout.digits(i);
    std::size_t k = 0;
    for (std::size_t j = 0; j < d.size(); ++j) k += d[j] * new_stride_of_old[j];
    map[i] = k;
  }
  return map;
}

}  // namespace

// ---------------------------------------------------------------------------
// States

DensityMatrix::DensityMatrix(Matrix mat, Layout layout) : layout_(std::move(layout)) {
  check_square(mat, layout_, "DensityMatrix");
  if (!mat.allFinite()) throw ConfigError("DensityMatrix: non-finite entries");
  if (!is_hermitian(mat, kStateTolerance)) throw ConfigError("DensityMatrix: matrix is not Hermitian");
  mat_ = hermitian_part(mat);
  const double tr = mat_.trace().real();
  if (std::abs(tr - 1.0) > kStateTolerance) {
    throw ConfigError("DensityMatrix: trace is " + std::to_string(tr) + ", expected 1");
  }
  const auto eig = eigh(mat_);
  if (eig.values.size() > 0 && eig.values(0) < -kStateTolerance) {
    throw ConfigError("DensityMatrix: negative eigenvalue " + std::to_string(eig.values(0)));
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) { return {psi.projector(), psi.layout()}; }

PureState::PureState(Vector amplitudes, Layout layout) : amps_(std::move(amplitudes)), layout_(std::move(layout)) {
  if (static_cast<std::size_t>(amps_.size()) != layout_.total_dim()) {
    throw ShapeError("PureState: " + std::to_string(amps_.size()) + " amplitudes for layout " + layout_.to_string());
  }
  if (!amps_.allFinite()) throw ConfigError("PureState: non-finite amplitudes");
  const double n = amps_.norm();
  if (std::abs(n - 1.0) > kStateTolerance) {
    throw ConfigError("PureState: norm is " + std::to_string(n) + ", expected 1");
  }
}

PureState PureState::basis(Layout layout, std::size_t index) {
  if (index >= layout.total_dim()) throw ShapeError("PureState::basis: index out of range");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return {std::move(v), std::move(layout)};
}

// ---------------------------------------------------------------------------
// Spectral helpers

HermitianEigen eigh(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
  if (solver.info() != Eigen::Success) throw ConfigError("eigh: decomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

Matrix psd_sqrt(const Matrix& psd) {
  const auto eig = eigh(hermitian_part(psd));
  RealVector roots = eig.values.unaryExpr([](double v) { return v > -kClipTolerance ? std::sqrt(std::max(v, 0.0)) : 0.0; });
  return eig.vectors * roots.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
}

std::size_t numerical_rank(const Matrix& hermitian, double cutoff) {
  const auto eig = eigh(hermitian_part(hermitian));
  return static_cast<std::size_t>((eig.values.array() > cutoff).count());
}

// ---------------------------------------------------------------------------
// Tensor structure

Matrix tensor(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector tensor(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return {tensor(a.matrix(), b.matrix()), a.layout().concat(b.layout())};
}

PureState tensor(const PureState& a, const PureState& b) {
  return {tensor(a.amplitudes(), b.amplitudes()), a.layout().concat(b.layout())};
}

Matrix partial_trace(const Matrix& m, const Layout& layout, const Labels& keep) {
  check_square(m, layout, "partial_trace");
  const IndexSplit split(layout, keep);
  const auto dk = static_cast<Eigen::Index>(split.selected_dim());
  Matrix out = Matrix::Zero(dk, dk);
  for (std::size_t t = 0; t < split.rest_dim(); ++t) {
    for (Eigen::Index r = 0; r < dk; ++r) {
      const auto fr = static_cast<Eigen::Index>(split.compose(static_cast<std::size_t>(r), t));
      for (Eigen::Index c = 0; c < dk; ++c) {
        out(r, c) += m(fr, static_cast<Eigen::Index>(split.compose(static_cast<std::size_t>(c), t)));
      }
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const Labels& keep) {
  return {partial_trace(rho.matrix(), rho.layout(), keep), rho.layout().select(keep)};
}

DensityMatrix reduced_state(const PureState& psi, const Labels& keep) {
  const IndexSplit split(psi.layout(), keep);
  Matrix amps(static_cast<Eigen::Index>(split.selected_dim()), static_cast<Eigen::Index>(split.rest_dim()));
  for (std::size_t s = 0; s < split.selected_dim(); ++s) {
    for (std::size_t r = 0; r < split.rest_dim(); ++r) {
      amps(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(r)) =
          psi.amplitudes()(static_cast<Eigen::Index>(split.compose(s, r)));
    }
  }
  Matrix reduced = amps * amps.adjoint();
  return {hermitian_part(reduced), psi.layout().select(keep)};
}

Matrix partial_transpose(const Matrix& m, const Layout& layout, const Labels& transposed) {
  check_square(m, layout, "partial_transpose");
  const IndexSplit split(layout, transposed);
  const auto n = m.rows();
  Matrix out(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto rs = split.selected_of(static_cast<std::size_t>(r));
    const auto rr = split.rest_of(static_cast<std::size_t>(r));
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto cs = split.selected_of(static_cast<std::size_t>(c));
      const auto cr = split.rest_of(static_cast<std::size_t>(c));
      out(static_cast<Eigen::Index>(split.compose(cs, rr)), static_cast<Eigen::Index>(split.compose(rs, cr))) = m(r, c);
    }
  }
  return out;
}

Matrix permute_subsystems(const Matrix& m, const Layout& layout, const Labels& order) {
  check_square(m, layout, "permute_subsystems");
  const auto map = reorder_map(layout, order);
  const auto n = m.rows();
  Matrix out(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      out(static_cast<Eigen::Index>(map[static_cast<std::size_t>(r)]),
          static_cast<Eigen::Index>(map[static_cast<std::size_t>(c)])) = m(r, c);
    }
  }
  return out;
}

Vector permute_subsystems(const Vector& v, const Layout& layout, const Labels& order) {
  if (static_cast<std::size_t>(v.size()) != layout.total_dim()) throw ShapeError("permute_subsystems: vector size");
  const auto map = reorder_map(layout, order);
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(map[static_cast<std::size_t>(i)])) = v(i);
  return out;
}

PureState permute_subsystems(const PureState& psi, const Labels& order) {
  return {permute_subsystems(psi.amplitudes(), psi.layout(), order), psi.layout().reordered(order)};
}

Matrix swap_operator(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d * d);
  Matrix f = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      f(static_cast<Eigen::Index>(j * d + i), static_cast<Eigen::Index>(i * d + j)) = 1.0;
    }
  }
  return f;
}

Matrix symmetric_projector(std::size_t d) { return (identity(d * d) + swap_operator(d)) * 0.5; }

Matrix symmetrize_permutations(const Matrix& m, const Layout& layout, const Labels& group) {
  check_square(m, layout, "symmetrize_permutations");
  const auto pos = layout.positions(group);
  if (pos.size() > 5) throw ConfigError("symmetrize_permutations: at most 5 subsystems may be permuted");
  if (pos.size() <= 1) return m;
  for (auto p : pos) {
    if (layout.at(p).dim != layout.at(pos.front()).dim) {
      throw ShapeError("symmetrize_permutations: subsystems in the group have unequal dimensions");
    }
  }

  std::vector<std::size_t> perm(pos.size());
  std::iota(perm.begin(), perm.end(), 0);
  Matrix acc = Matrix::Zero(m.rows(), m.cols());
  std::size_t count = 0;
  const std::size_t n = layout.total_dim();
  std::vector<std::size_t> map(n);
  do {
    // Subsystem at group slot g moves to group slot perm[g].
    for (std::size_t i = 0; i < n; ++i) {
      const auto d = layout.digits(i);
      std::size_t k = i;
      for (std::size_t g = 0; g < pos.size(); ++g) {
        k -= d[pos[g]] * layout.stride(pos[g]);
        k += d[pos[g]] * layout.stride(pos[perm[g]]);
      }
      map[i] = k;
    }
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        acc(static_cast<Eigen::Index>(map[r]), static_cast<Eigen::Index>(map[c])) +=
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
    }
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc / static_cast<double>(count);
}

// ---------------------------------------------------------------------------
// Norms and fidelity

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (m.rows() == m.cols() && is_hermitian(m, 1e-12 * scale)) {
    const auto eig = eigh(hermitian_part(m));
    return std::max(std::abs(eig.values(0)), std::abs(eig.values(eig.values.size() - 1)));
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double fidelity_exact(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw ShapeError("fidelity_exact: dimension mismatch");
  }
  // Trace norm from singular values of sqrt(rho) sqrt(sigma). Taking square
  // roots of the eigenvalues of sqrt(rho) sigma sqrt(rho) instead turns
  // rounding-level eigenvalues into ~1e-8 errors on rank-deficient inputs.
  const Eigen::BDCSVD<Matrix> svd(psd_sqrt(rho) * psd_sqrt(sigma));
  const double tr = svd.singularValues().sum();
  return std::clamp(tr * tr, 0.0, 1.0);
}

double fidelity_exact(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (!(rho.layout() == sigma.layout())) {
    if (rho.dim() != sigma.dim()) throw ShapeError("fidelity_exact: dimension mismatch");
    throw ShapeError("fidelity_exact: layouts differ: " + rho.layout().to_string() + " vs " +
                     sigma.layout().to_string());
  }
  return fidelity_exact(rho.matrix(), sigma.matrix());
}

}  // namespace steerfid
