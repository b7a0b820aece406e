#include "steerfid/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "steerfid/errors.hpp"
#include "steerfid/parallel.hpp"
#include "steerfid/random_states.hpp"
#include "steerfid/states.hpp"

namespace steerfid {

namespace {

std::size_t product(const std::vector<std::size_t>& dims) {
  std::size_t p = 1;
  for (auto d : dims) p *= d;
  return p;
}

Vector kron_factors(const std::vector<Vector>& factors) {
  Vector out = Vector::Ones(1);
  for (const auto& f : factors) out = tensor(out, f);
  return out;
}

// <phi_others| psi with party j left open.
Vector contract_except(const Vector& psi, const std::vector<std::size_t>& dims, const std::vector<Vector>& factors,
                       std::size_t j) {
  const std::size_t n = dims.size();
  std::vector<std::size_t> stride(n, 1);
  for (std::size_t i = n - 1; i > 0; --i) stride[i - 1] = stride[i] * dims[i];
  Vector w = Vector::Zero(static_cast<Eigen::Index>(dims[j]));
  for (Eigen::Index idx = 0; idx < psi.size(); ++idx) {
    const cplx amp = psi(idx);
    if (amp == cplx(0.0)) continue;
    cplx c = amp;
    std::size_t rem = static_cast<std::size_t>(idx);
    std::size_t dj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t d = rem / stride[i];
      rem %= stride[i];
      if (i == j) {
        dj = d;
      } else {
        c *= std::conj(factors[i](static_cast<Eigen::Index>(d)));
      }
    }
    w(static_cast<Eigen::Index>(dj)) += c;
  }
  return w;
}

Vector unit_or_basis(const Vector& v) {
  const double nrm = v.norm();
  if (nrm > 1e-300) return v / nrm;
  Vector e = Vector::Zero(v.size());
  e(0) = 1.0;
  return e;
}

// Alternating ascent on the factors (in place); returns the final overlap.
double ascend(const Vector& psi, const std::vector<std::size_t>& dims, std::vector<Vector>& factors, double tol,
              std::size_t max_iter) {
  double value = std::norm(kron_factors(factors).dot(psi));
  for (std::size_t it = 0; it < max_iter; ++it) {
    double next = 0.0;
    for (std::size_t j = 0; j < dims.size(); ++j) {
      const Vector w = contract_except(psi, dims, factors, j);
      factors[j] = unit_or_basis(w);
      next = w.squaredNorm();
    }
    const bool done = next - value <= tol;
    value = std::max(value, next);
    if (done) break;
  }
  return value;
}

// Top eigenvector of each single-party marginal.
std::vector<Vector> marginal_start(const Vector& psi, const std::vector<std::size_t>& dims) {
  std::vector<Subsystem> subs;
  for (std::size_t i = 0; i < dims.size(); ++i) subs.push_back({"P" + std::to_string(i), dims[i]});
  const PureState state(unit_or_basis(psi), Layout(subs));
  std::vector<Vector> out;
  for (const auto& s : subs) {
    const auto eig = eigh(reduced_state(state, {s.label}).matrix());
    out.push_back(eig.vectors.col(eig.vectors.cols() - 1));
  }
  return out;
}

std::vector<Vector> random_start(const std::vector<std::size_t>& dims, CounterRng& rng) {
  std::vector<Vector> out;
  for (auto d : dims) out.push_back(random_pure_state(Layout({{"P", d}}), rng).amplitudes());
  return out;
}

ProductOverlap bipartite_overlap(const Vector& psi, std::size_t d0, std::size_t d1) {
  Matrix m(static_cast<Eigen::Index>(d0), static_cast<Eigen::Index>(d1));
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) = psi.segment(i * m.cols(), m.cols()).transpose();
  const Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ProductOverlap out;
  const double s = svd.singularValues()(0);
  out.value = s * s;
  out.factors = {svd.matrixU().col(0), svd.matrixV().col(0).conjugate()};
  return out;
}

// Best product for one branch; multipartite branches start from `warm` when given.
ProductOverlap branch_overlap(const Vector& psi, const std::vector<std::size_t>& dims, const OracleConfig& cfg,
                              const std::vector<Vector>* warm) {
  if (dims.size() == 2) return bipartite_overlap(psi, dims[0], dims[1]);
  ProductOverlap best;
  std::vector<Vector> f = warm != nullptr ? *warm : marginal_start(psi, dims);
  best.value = ascend(psi, dims, f, cfg.inner_tol, cfg.max_inner_iter);
  best.factors = f;
  if (warm != nullptr) {
    // A fresh marginal start guards against the warm start drifting into a poor basin.
    std::vector<Vector> g = marginal_start(psi, dims);
    const double v = ascend(psi, dims, g, cfg.inner_tol, cfg.max_inner_iter);
    if (v > best.value) {
      best.value = v;
      best.factors = std::move(g);
    }
  }
  return best;
}

Matrix polar(const Matrix& g) {
  const Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

struct RestartResult {
  double value = 0.0;
  Matrix isometry;
  std::vector<std::vector<Vector>> factors;
};

RestartResult polar_ascent(const Matrix& k, const std::vector<std::size_t>& dims, std::size_t branches,
                           const OracleConfig& cfg, CounterRng rng) {
  const auto r = k.rows();
  const auto nx = static_cast<Eigen::Index>(branches);
  RestartResult res;
  res.isometry = random_isometry(branches, static_cast<std::size_t>(r), rng);
  res.factors.resize(branches);
  double prev = -1.0;
  Matrix v = res.isometry;
  std::vector<std::vector<Vector>> factors(branches);
  for (std::size_t it = 0; it < cfg.max_inner_iter; ++it) {
    const Matrix b = v * k;  // row x: unnormalized branch x
    double value = 0.0;
    Matrix g(nx, r);
    for (Eigen::Index x = 0; x < nx; ++x) {
      const Vector psi = b.row(x).transpose();
      const auto po = branch_overlap(psi, dims, cfg, factors[static_cast<std::size_t>(x)].empty() ? nullptr
                                                                                                  : &factors[static_cast<std::size_t>(x)]);
      factors[static_cast<std::size_t>(x)] = po.factors;
      value += po.value;
      const Vector phi = kron_factors(po.factors);
      const Vector c = (phi.adjoint() * k.transpose()).transpose();  // c_i = <phi|K_i>
      const cplx gx = (v.row(x) * c)(0);  // sum_i V_xi c_i
      g.row(x) = gx * c.adjoint();
    }
    if (value > res.value || it == 0) {
      res.value = value;
      res.isometry = v;
      res.factors = factors;
    }
    if (value - prev <= cfg.inner_tol) break;
    prev = value;
    v = polar(g);
  }
  return res;
}

}  // namespace

void OracleConfig::validate() const {
  if (restarts < 1) throw ConfigError("oracle restarts must be at least 1");
  if (!(inner_tol > 0.0)) throw ConfigError("oracle inner_tol must be positive");
  if (max_inner_iter < 1) throw ConfigError("oracle max_inner_iter must be at least 1");
}

ProductOverlap product_overlap(const Vector& psi, const std::vector<std::size_t>& dims, const OracleConfig& cfg) {
  cfg.validate();
  if (dims.empty() || product(dims) != static_cast<std::size_t>(psi.size())) {
    throw ShapeError("product_overlap: party dimensions do not match the state");
  }
  if (dims.size() == 1) return {psi.squaredNorm(), {unit_or_basis(psi)}};
  if (dims.size() == 2) return bipartite_overlap(psi, dims[0], dims[1]);

  ProductOverlap best = branch_overlap(psi, dims, cfg, nullptr);
  const CounterRng root(cfg.seed);
  for (std::size_t s = 0; s < cfg.restarts; ++s) {
    CounterRng rng = root.split(s);
    std::vector<Vector> f = random_start(dims, rng);
    const double v = ascend(psi, dims, f, cfg.inner_tol, cfg.max_inner_iter);
    if (v > best.value) best = {v, std::move(f)};
  }
  return best;
}

double fs_pure(const PureState& psi, const std::vector<Labels>& partitions, const OracleConfig& cfg) {
  const DensityMatrix proxy(Matrix::Identity(static_cast<Eigen::Index>(psi.dim()), static_cast<Eigen::Index>(psi.dim())) /
                                static_cast<double>(psi.dim()),
                            psi.layout());
  const Layout ordered = detail::ordered_state(proxy, partitions).layout();
  const PureState p = permute_subsystems(psi, detail::flatten(partitions));
  std::vector<std::size_t> dims;
  for (const auto& part : partitions) dims.push_back(ordered.dim_of(part));
  return product_overlap(p.amplitudes(), dims, cfg).value;
}

OracleReport fs_bruteforce_report(const DensityMatrix& rho, const std::vector<Labels>& partitions,
                                  const OracleConfig& cfg) {
  cfg.validate();
  if (rho.dim() > kMaxOracleDim) {
    throw ConfigError("fs_bruteforce handles total dimension up to " + std::to_string(kMaxOracleDim) + ", got " +
                      std::to_string(rho.dim()));
  }
  const DensityMatrix ordered = detail::ordered_state(rho, partitions);
  std::vector<std::size_t> dims;
  for (const auto& part : partitions) dims.push_back(ordered.layout().dim_of(part));

  const std::size_t r = std::max<std::size_t>(1, numerical_rank(ordered.matrix()));
  const std::size_t branches = cfg.decomposition_dim == 0 ? r * r : cfg.decomposition_dim;
  if (branches < r) {
    throw ConfigError("decomposition_dim " + std::to_string(branches) + " is below rank " + std::to_string(r));
  }
  const PureState psi = purify(ordered, detail::free_label(ordered.layout(), "R"), r);
  const Matrix k = detail::as_matrix(psi, r);

  std::vector<RestartResult> runs(cfg.restarts);
  const CounterRng root(cfg.seed);
  parallel_for(cfg.restarts, worker_count(),
               [&](std::size_t s) { runs[s] = polar_ascent(k, dims, branches, cfg, root.split(s)); });

  OracleReport rep;
  rep.rank = r;
  std::size_t best = 0;
  for (std::size_t s = 0; s < runs.size(); ++s) {
    rep.restart_values.push_back(runs[s].value);
    if (runs[s].value > runs[best].value) best = s;
  }
  rep.value = std::clamp(runs[best].value, 0.0, 1.0);
  rep.isometry = runs[best].isometry;
  rep.factors = runs[best].factors;
  const Matrix b = rep.isometry * k;
  for (Eigen::Index x = 0; x < b.rows(); ++x) rep.branch_probs.push_back(b.row(x).squaredNorm());
  return rep;
}

double fs_bruteforce(const DensityMatrix& rho, const std::vector<Labels>& partitions, const OracleConfig& cfg) {
  return fs_bruteforce_report(rho, partitions, cfg).value;
}

EbChannelSpec eb_from_report(const OracleReport& report) {
  EbChannelSpec eb;
  for (Eigen::Index x = 0; x < report.isometry.rows(); ++x) {
    const Vector m = report.isometry.row(x).adjoint();
    eb.povm.push_back(m * m.adjoint());
    const auto& f = report.factors.at(static_cast<std::size_t>(x));
    eb.preps.emplace_back(f.begin(), f.end() - 1);
  }
  return eb;
}

}  // namespace steerfid
