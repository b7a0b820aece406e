// Infeasible primal-dual path-following with the HKM search direction and a
// Mehrotra predictor-corrector. Dense per block; constraint matrices are kept
// sparse and the Schur complement M_ij = Tr(A_i X A_j Z^-1) is assembled from
// G_j = X A_j Z^-1 one block at a time.

#include <algorithm>
#include <cmath>
#include <limits>

#include "steerfid/errors.hpp"
#include "steerfid/sdp.hpp"

namespace steerfid {

namespace {

using Dense = Eigen::MatrixXd;
using Blocks = std::vector<Dense>;

struct FullEntry {
  std::uint32_t row;
  std::uint32_t col;
  double value;
};

// A constraint restricted to one block, with both triangles expanded.
struct BlockPart {
  std::size_t constraint;
  std::vector<FullEntry> entries;
  std::vector<std::uint32_t> rows;  // distinct rows of `entries`
};

struct Prepared {
  std::size_t m = 0;
  std::vector<std::size_t> dims;
  std::vector<std::vector<BlockPart>> by_block;  // sorted by constraint index
  Blocks c;
  Eigen::VectorXd b;
};

Prepared prepare(const SdpProblem& p) {
  Prepared out;
  out.m = p.constraints.size();
  out.dims = p.block_dims;
  out.by_block.resize(p.block_dims.size());
  for (auto d : p.block_dims) out.c.push_back(Dense::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
  for (const auto& e : p.objective) {
    out.c[e.block](e.row, e.col) += e.value;
    if (e.row != e.col) out.c[e.block](e.col, e.row) += e.value;
  }
  out.b = Eigen::Map<const Eigen::VectorXd>(p.rhs.data(), static_cast<Eigen::Index>(p.rhs.size()));
  for (std::size_t i = 0; i < out.m; ++i) {
    std::vector<BlockPart*> parts(p.block_dims.size(), nullptr);
    for (const auto& e : p.constraints[i]) {
      auto& list = out.by_block[e.block];
      if (parts[e.block] == nullptr) {
        list.push_back({i, {}, {}});
        parts[e.block] = &list.back();
      }
      parts[e.block]->entries.push_back({e.row, e.col, e.value});
      if (e.row != e.col) parts[e.block]->entries.push_back({e.col, e.row, e.value});
    }
    // Pointers into the vectors may be invalidated by later push_backs of
    // other constraints only; finish this constraint's row sets now.
    for (std::size_t b = 0; b < parts.size(); ++b) {
      if (parts[b] == nullptr) continue;
      auto& rows = parts[b]->rows;
      for (const auto& fe : parts[b]->entries) rows.push_back(fe.row);
      std::sort(rows.begin(), rows.end());
      rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    }
  }
  return out;
}

double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k].array() * b[k].array()).sum();
  return s;
}

double frob(const Blocks& a) { return std::sqrt(inner(a, a)); }

// A(X)_i = <A_i, X>
Eigen::VectorXd apply_a(const Prepared& p, const Blocks& x) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.m));
  for (std::size_t b = 0; b < p.by_block.size(); ++b) {
    for (const auto& part : p.by_block[b]) {
      double s = 0.0;
      for (const auto& e : part.entries) s += e.value * x[b](e.row, e.col);
      out(static_cast<Eigen::Index>(part.constraint)) += s;
    }
  }
  return out;
}

// sum_i y_i A_i
Blocks apply_at(const Prepared& p, const Eigen::VectorXd& y) {
  Blocks out;
  for (auto d : p.dims) out.push_back(Dense::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
  for (std::size_t b = 0; b < p.by_block.size(); ++b) {
    for (const auto& part : p.by_block[b]) {
      const double yi = y(static_cast<Eigen::Index>(part.constraint));
      for (const auto& e : part.entries) out[b](e.row, e.col) += yi * e.value;
    }
  }
  return out;
}

Dense sym(const Dense& m) { return 0.5 * (m + m.transpose()); }

// Largest step in (0, inf] keeping x + alpha dx positive semidefinite.
double max_step(const Blocks& x, const Blocks& dx, bool& ok) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) {
    Eigen::LLT<Dense> llt(x[k]);
    if (llt.info() != Eigen::Success) {
      ok = false;
      return 0.0;
    }
    Dense w = llt.matrixL().solve(dx[k]);
    w = llt.matrixL().solve(w.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<Dense> es(sym(w), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

Dense schur(const Prepared& p, const Blocks& x, const Blocks& zinv) {
  const auto m = static_cast<Eigen::Index>(p.m);
  Dense mat = Dense::Zero(m, m);
  for (std::size_t b = 0; b < p.by_block.size(); ++b) {
    const auto& parts = p.by_block[b];
    const auto n = static_cast<Eigen::Index>(p.dims[b]);
    for (std::size_t jp = 0; jp < parts.size(); ++jp) {
      const auto& pj = parts[jp];
      const auto nr = static_cast<Eigen::Index>(pj.rows.size());
      // T = (A_j Z^-1) restricted to the rows where A_j is nonzero.
      Dense t = Dense::Zero(nr, n);
      for (const auto& e : pj.entries) {
        const auto r = static_cast<Eigen::Index>(std::lower_bound(pj.rows.begin(), pj.rows.end(), e.row) - pj.rows.begin());
        t.row(r) += e.value * zinv[b].row(e.col);
      }
      Dense xs(n, nr);
      for (Eigen::Index r = 0; r < nr; ++r) xs.col(r) = x[b].col(pj.rows[static_cast<std::size_t>(r)]);
      const Dense g = xs * t;  // X A_j Z^-1
      const auto j = static_cast<Eigen::Index>(pj.constraint);
      for (std::size_t ip = jp; ip < parts.size(); ++ip) {
        double s = 0.0;
        for (const auto& e : parts[ip].entries) s += e.value * g(e.col, e.row);
        mat(static_cast<Eigen::Index>(parts[ip].constraint), j) += s;
      }
    }
  }
  mat.triangularView<Eigen::StrictlyUpper>() = mat.transpose().triangularView<Eigen::StrictlyUpper>();
  return mat;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options) {
  problem.validate();
  if (problem.total_dim() > options.max_total_dim) {
    throw ConfigError("SDP total dimension " + std::to_string(problem.total_dim()) + " exceeds the limit of " +
                      std::to_string(options.max_total_dim));
  }
  const Prepared p = prepare(problem);
  const std::size_t nb = p.dims.size();
  const double n_total = static_cast<double>(problem.total_dim());
  const auto m = static_cast<Eigen::Index>(p.m);

  // Starting point scaled to the data.
  double max_a = 0.0;
  double ratio = 0.0;
  for (std::size_t i = 0; i < p.m; ++i) {
    double norm2 = 0.0;
    for (const auto& e : problem.constraints[i]) norm2 += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
    const double na = std::sqrt(norm2);
    max_a = std::max(max_a, na);
    ratio = std::max(ratio, (1.0 + std::abs(p.b(static_cast<Eigen::Index>(i)))) / (1.0 + na));
  }
  const double norm_c = frob(p.c);
  const double norm_b = p.b.norm();
  const double xi = std::max({10.0, std::sqrt(n_total), n_total * ratio});
  const double eta = std::max({10.0, std::sqrt(n_total), max_a, norm_c});

  Blocks x;
  Blocks z;
  for (auto d : p.dims) {
    x.push_back(xi * Dense::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
    z.push_back(eta * Dense::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

  SdpSolution sol;
  sol.status = SdpStatus::max_iter;
  const auto record = [&](const Eigen::VectorXd& rp, const Blocks& rd) {
    sol.primal_value = inner(p.c, x);
    sol.dual_value = p.b.dot(y);
    sol.residuals.primal = rp.norm() / (1.0 + norm_b);
    sol.residuals.dual = frob(rd) / (1.0 + norm_c);
    sol.residuals.gap =
        std::abs(sol.primal_value - sol.dual_value) / (1.0 + std::abs(sol.primal_value) + std::abs(sol.dual_value));
  };

  for (std::size_t iter = 0; iter <= options.max_iter; ++iter) {
    sol.iterations = iter;
    const Eigen::VectorXd rp = p.b - apply_a(p, x);
    const Blocks aty = apply_at(p, y);
    Blocks rd(nb);
    for (std::size_t k = 0; k < nb; ++k) rd[k] = p.c[k] + z[k] - aty[k];
    record(rp, rd);
    if (sol.residuals.gap <= options.gap_tol && sol.residuals.primal <= options.feas_tol &&
        sol.residuals.dual <= options.feas_tol) {
      sol.status = SdpStatus::optimal;
      break;
    }
    if (iter == options.max_iter) break;

    const double mu = inner(x, z) / n_total;
    Blocks zinv(nb);
    bool ok = true;
    for (std::size_t k = 0; k < nb; ++k) {
      Eigen::LLT<Dense> llt(z[k]);
      if (llt.info() != Eigen::Success) {
        ok = false;
        break;
      }
      zinv[k] = llt.solve(Dense::Identity(z[k].rows(), z[k].cols()));
      zinv[k] = sym(zinv[k]);
    }
    if (!ok) {
      sol.status = SdpStatus::numerical_failure;
      break;
    }

    Dense mat = schur(p, x, zinv);
    Eigen::LLT<Dense> chol(mat);
    Eigen::LDLT<Dense> ldlt;
    bool use_ldlt = false;
    if (chol.info() != Eigen::Success) {
      ldlt.compute(mat);
      if (ldlt.info() != Eigen::Success) {
        sol.status = SdpStatus::numerical_failure;
        break;
      }
      use_ldlt = true;
    }
    const auto solve_m = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
      return use_ldlt ? Eigen::VectorXd(ldlt.solve(rhs)) : Eigen::VectorXd(chol.solve(rhs));
    };

    // X R_d Z^-1 is shared by both directions.
    Blocks xrz(nb);
    for (std::size_t k = 0; k < nb; ++k) xrz[k] = sym(x[k] * rd[k] * zinv[k]);
    const Eigen::VectorXd a_xrz = apply_a(p, xrz);

    // Direction for dX = K - X dZ Z^-1, dZ = sum dy A - R_d.
    const auto direction = [&](const Blocks& k_term, Eigen::VectorXd& dy, Blocks& dx, Blocks& dz) {
      dy = solve_m(apply_a(p, k_term) + a_xrz - rp);
      dz = apply_at(p, dy);
      dx.resize(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        dz[k] -= rd[k];
        dx[k] = sym(k_term[k] - x[k] * dz[k] * zinv[k]);
      }
    };

    // Predictor (affine scaling).
    Blocks k_aff(nb);
    for (std::size_t k = 0; k < nb; ++k) k_aff[k] = -x[k];
    Eigen::VectorXd dy_a;
    Blocks dx_a;
    Blocks dz_a;
    direction(k_aff, dy_a, dx_a, dz_a);
    bool step_ok = true;
    const double ap_a = std::min(1.0, max_step(x, dx_a, step_ok));
    const double ad_a = std::min(1.0, max_step(z, dz_a, step_ok));
    if (!step_ok) {
      sol.status = SdpStatus::numerical_failure;
      break;
    }
    Blocks xa(nb);
    Blocks za(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      xa[k] = x[k] + ap_a * dx_a[k];
      za[k] = z[k] + ad_a * dz_a[k];
    }
    const double mu_aff = inner(xa, za) / n_total;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // Corrector.
    Blocks k_cor(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      k_cor[k] = sigma * mu * zinv[k] - x[k] - dx_a[k] * dz_a[k] * zinv[k];
    }
    Eigen::VectorXd dy;
    Blocks dx;
    Blocks dz;
    direction(k_cor, dy, dx, dz);
    const double ap = std::min(1.0, 0.95 * max_step(x, dx, step_ok));
    const double ad = std::min(1.0, 0.95 * max_step(z, dz, step_ok));
    if (!step_ok || !(ap > 0.0) || !(ad > 0.0)) {
      sol.status = SdpStatus::numerical_failure;
      break;
    }
    for (std::size_t k = 0; k < nb; ++k) {
      x[k] += ap * dx[k];
      z[k] += ad * dz[k];
    }
    y += ad * dy;
  }

  sol.x = x;
  sol.z = z;
  sol.y.assign(y.data(), y.data() + y.size());
  return sol;
}

}  // namespace steerfid
