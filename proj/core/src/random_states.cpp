#include "steerfid/random_states.hpp"

#include <cmath>
#include <numbers>

#include "steerfid/errors.hpp"

namespace steerfid {

Matrix ginibre(std::size_t rows, std::size_t cols, CounterRng& rng) {
  Matrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index c = 0; c < g.cols(); ++c) {
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(r, c) = cplx(re, im) * (1.0 / std::numbers::sqrt2);
    }
  }
  return g;
}

Matrix random_isometry(std::size_t rows, std::size_t cols, CounterRng& rng) {
  if (cols > rows) throw ShapeError("random_isometry: more columns than rows");
  const Matrix g = ginibre(rows, cols, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
  const Matrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const cplx d = r(j, j);
    const double a = std::abs(d);
    if (a > 0.0) q.col(j) *= d / a;
  }
  return q;
}

Matrix random_unitary(std::size_t d, CounterRng& rng) { return random_isometry(d, d, rng); }

PureState random_pure_state(const Layout& layout, CounterRng& rng) {
  Vector v = ginibre(layout.total_dim(), 1, rng).col(0);
  v.normalize();
  return {std::move(v), layout};
}

DensityMatrix random_density_matrix(const Layout& layout, CounterRng& rng, std::size_t rank) {
  const std::size_t d = layout.total_dim();
  if (rank == 0 || rank > d) rank = d;
  const Matrix g = ginibre(d, rank, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return {hermitian_part(rho), layout};
}

}  // namespace steerfid
