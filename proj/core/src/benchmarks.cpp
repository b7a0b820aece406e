#include "steerfid/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "steerfid/errors.hpp"
#include "steerfid/states.hpp"

namespace steerfid {

namespace {

using Entries = std::vector<std::tuple<std::size_t, std::size_t, cplx>>;

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

// rho reordered to [a..., b...]; every subsystem must be in exactly one group.
DensityMatrix ordered_bipartite(const DensityMatrix& rho, const BipartiteSplit& split) {
  if (split.a.empty() || split.b.empty()) throw ConfigError("bipartite split needs non-empty A and B");
  Labels order = split.a;
  order.insert(order.end(), split.b.begin(), split.b.end());
  std::set<std::string> seen(order.begin(), order.end());
  if (seen.size() != order.size()) throw ConfigError("a label appears twice in the bipartite split");
  for (const auto& l : order) {
    if (!rho.layout().contains(l)) throw AddressingError("unknown label " + l + " in bipartite split");
  }
  if (order.size() != rho.layout().size()) throw ConfigError("bipartite split must cover every subsystem");
  return {permute_subsystems(rho.matrix(), rho.layout(), order), rho.layout().reordered(order)};
}

struct Support {
  RealVector values;  // descending, above the rank cutoff
  Matrix vectors;     // columns
};

Support support_of(const Matrix& rho) {
  const auto eig = eigh(hermitian_part(rho));
  const std::size_t r = std::max<std::size_t>(1, numerical_rank(rho));
  const auto n = eig.values.size();
  Support s;
  s.values.resize(static_cast<Eigen::Index>(r));
  s.vectors.resize(rho.rows(), static_cast<Eigen::Index>(r));
  for (std::size_t i = 0; i < r; ++i) {
    const Eigen::Index col = n - 1 - static_cast<Eigen::Index>(i);
    s.values(static_cast<Eigen::Index>(i)) = std::max(eig.values(col), 0.0);
    s.vectors.col(static_cast<Eigen::Index>(i)) = eig.vectors.col(col);
  }
  return s;
}

// Pushes sparse operator entries through a partial trace over `traced`
// followed by a partial transpose on `transposed` (labels of the result).
Entries map_entries(const Entries& in, const Layout& layout, const Labels& traced, const Labels& transposed) {
  const Layout kept = layout.without(traced);
  std::vector<bool> is_traced(layout.size(), false);
  for (auto p : layout.positions(traced)) is_traced[p] = true;
  std::vector<bool> is_transposed(kept.size(), false);
  for (auto p : kept.positions(transposed)) is_transposed[p] = true;

  Entries out;
  out.reserve(in.size());
  for (const auto& [r, c, v] : in) {
    const auto dr = layout.digits(r);
    const auto dc = layout.digits(c);
    bool keep = true;
    std::size_t nr = 0;
    std::size_t nc = 0;
    std::size_t k = 0;
    for (std::size_t j = 0; j < layout.size(); ++j) {
      if (is_traced[j]) {
        if (dr[j] != dc[j]) {
          keep = false;
          break;
        }
        continue;
      }
      const bool t = is_transposed[k];
      nr += (t ? dc[j] : dr[j]) * kept.stride(k);
      nc += (t ? dr[j] : dc[j]) * kept.stride(k);
      ++k;
    }
    if (keep) out.emplace_back(nr, nc, v);
  }
  return out;
}

Layout extension_layout(std::size_t dim_s, std::size_t dim_x, std::size_t k) {
  std::vector<Subsystem> subs{{"S", dim_s}};
  for (std::size_t i = 1; i <= k; ++i) subs.push_back({"X" + std::to_string(i), dim_x});
  return Layout(std::move(subs));
}

Labels copies(std::size_t from, std::size_t to) {
  Labels out;
  for (std::size_t i = from; i <= to; ++i) out.push_back("X" + std::to_string(i));
  return out;
}

void check_extension(std::size_t k) {
  if (k < 1 || k > kMaxExtension) {
    throw ConfigError("extension level k=" + std::to_string(k) + " outside the supported range 1.." +
                      std::to_string(kMaxExtension));
  }
}

void check_dims(std::size_t complex_sum) {
  if (complex_sum > kMaxBenchmarkDim) {
    throw ConfigError("benchmark SDP needs blocks of total dimension " + std::to_string(complex_sum) +
                      ", above the limit of " + std::to_string(kMaxBenchmarkDim));
  }
}

BenchmarkResult finish(const LmiBuilder::Result& res, std::size_t k, const LmiBuilder& lmi) {
  BenchmarkResult out;
  out.optimum = res.value;
  out.k = k;
  out.status = res.solution.status;
  out.residuals = res.solution.residuals;
  out.iterations = res.solution.iterations;
  out.num_params = lmi.num_params();
  out.complex_dim = lmi.complex_dim_sum();
  return out;
}

}  // namespace

std::vector<HermitianBasisElement> symmetric_hermitian_basis(std::size_t dim_s, std::size_t dim_x, std::size_t k) {
  const Layout layout = extension_layout(dim_s, dim_x, k);
  const std::size_t n = layout.total_dim();
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<std::size_t>> maps;
  do {
    std::vector<std::size_t> map(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto d = layout.digits(i);
      std::size_t j = d[0] * layout.stride(0);
      for (std::size_t g = 0; g < k; ++g) j += d[1 + g] * layout.stride(1 + perm[g]);
      map[i] = j;
    }
    maps.push_back(std::move(map));
  } while (std::next_permutation(perm.begin(), perm.end()));

  const auto canonical = [&](std::size_t r, std::size_t c) {
    std::size_t best = r * n + c;
    for (const auto& m : maps) best = std::min(best, m[r] * n + m[c]);
    return best;
  };
  std::map<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> orbits;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) orbits[canonical(r, c)].emplace_back(r, c);
  }

  std::vector<HermitianBasisElement> basis;
  for (const auto& [key, members] : orbits) {
    const auto [r0, c0] = members.front();
    const std::size_t tkey = canonical(c0, r0);
    if (tkey == key) {
      HermitianBasisElement e;
      for (const auto& [r, c] : members) e.entries.emplace_back(r, c, 1.0);
      basis.push_back(std::move(e));
    } else if (key < tkey) {
      const auto& mirror = orbits.at(tkey);
      HermitianBasisElement re;
      HermitianBasisElement im;
      for (const auto& [r, c] : members) {
        re.entries.emplace_back(r, c, 1.0);
        im.entries.emplace_back(r, c, cplx(0.0, 1.0));
      }
      for (const auto& [r, c] : mirror) {
        re.entries.emplace_back(r, c, 1.0);
        im.entries.emplace_back(r, c, cplx(0.0, -1.0));
      }
      basis.push_back(std::move(re));
      basis.push_back(std::move(im));
    }
  }
  return basis;
}

BenchmarkResult fidelity_sdp_detail(const DensityMatrix& rho, const DensityMatrix& sigma, const SdpOptions& options) {
  if (rho.dim() != sigma.dim()) throw ShapeError("fidelity_sdp: dimension mismatch");
  const Support sr = support_of(rho.matrix());
  const Support ss = support_of(sigma.matrix());
  const auto r1 = static_cast<std::size_t>(sr.values.size());
  const auto r2 = static_cast<std::size_t>(ss.values.size());
  const Matrix q = ss.vectors.adjoint() * sr.vectors;  // r2 x r1

  LmiBuilder lmi;
  const auto blk = lmi.add_block("fidelity", r1 + r2);
  for (std::size_t i = 0; i < r1; ++i) lmi.add_entry(LmiBuilder::kConstant, blk, i, i, sr.values(static_cast<Eigen::Index>(i)));
  for (std::size_t i = 0; i < r2; ++i) {
    lmi.add_entry(LmiBuilder::kConstant, blk, r1 + i, r1 + i, ss.values(static_cast<Eigen::Index>(i)));
  }
  for (std::size_t a = 0; a < r1; ++a) {
    for (std::size_t b = 0; b < r2; ++b) {
      const int pr = lmi.add_param();
      const int pi = lmi.add_param();
      lmi.add_hermitian(pr, blk, a, r1 + b, 1.0);
      lmi.add_hermitian(pi, blk, a, r1 + b, cplx(0.0, 1.0));
      const cplx qba = q(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a));
      lmi.add_objective(pr, qba.real());
      lmi.add_objective(pi, -qba.imag());
    }
  }
  const auto res = lmi.solve(options);
  BenchmarkResult out = finish(res, 0, lmi);
  out.value = std::clamp(res.value, 0.0, 1.0);
  out.value *= out.value;
  return out;
}

double fidelity_sdp(const DensityMatrix& rho, const DensityMatrix& sigma, const SdpOptions& options) {
  const auto r = fidelity_sdp_detail(rho, sigma, options);
  if (r.status != SdpStatus::optimal) {
    throw SolverError(std::string("fidelity SDP ended with status ") + to_string(r.status));
  }
  return r.value;
}

BenchmarkResult benchmark1(const DensityMatrix& rho, const BipartiteSplit& split, std::size_t k,
                           const SdpOptions& options) {
  check_extension(k);
  const DensityMatrix ordered = ordered_bipartite(rho, split);
  const std::size_t da = ordered.layout().dim_of(split.a);
  const std::size_t db = ordered.layout().dim_of(split.b);
  const std::size_t dab = da * db;
  const Support sup = support_of(ordered.matrix());
  const auto r = static_cast<std::size_t>(sup.values.size());

  std::size_t complex_sum = r + dab + da * ipow(db, k);
  for (std::size_t j = 1; j <= k; ++j) complex_sum += da * ipow(db, j);
  check_dims(complex_sum);

  LmiBuilder lmi;
  const auto blk_f = lmi.add_block("fidelity", r + dab);
  const auto blk_s = lmi.add_block("sigma", da * ipow(db, k));
  std::vector<std::size_t> blk_ppt;
  for (std::size_t j = 1; j <= k; ++j) blk_ppt.push_back(lmi.add_block("ppt" + std::to_string(j), da * ipow(db, j)));

  for (std::size_t i = 0; i < r; ++i) lmi.add_entry(LmiBuilder::kConstant, blk_f, i, i, sup.values(static_cast<Eigen::Index>(i)));
  // X = V Xhat with Xhat of size r x dab; Re Tr X = Re Tr(Xhat V).
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = 0; b < dab; ++b) {
      const int pr = lmi.add_param();
      const int pi = lmi.add_param();
      lmi.add_hermitian(pr, blk_f, a, r + b, 1.0);
      lmi.add_hermitian(pi, blk_f, a, r + b, cplx(0.0, 1.0));
      const cplx v = sup.vectors(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a));
      lmi.add_objective(pr, v.real());
      lmi.add_objective(pi, -v.imag());
    }
  }

  const Layout layout = extension_layout(da, db, k);
  std::vector<std::pair<int, double>> trace_terms;
  for (const auto& e : symmetric_hermitian_basis(da, db, k)) {
    const int p = lmi.add_param();
    double tr = 0.0;
    for (const auto& [row, col, v] : e.entries) {
      lmi.add_entry(p, blk_s, row, col, v);
      if (row == col) tr += v.real();
    }
    if (tr != 0.0) trace_terms.emplace_back(p, tr);
    for (const auto& [row, col, v] : map_entries(e.entries, layout, copies(2, k), {})) {
      lmi.add_entry(p, blk_f, r + row, r + col, v);
    }
    for (std::size_t j = 1; j <= k; ++j) {
      for (const auto& [row, col, v] : map_entries(e.entries, layout, copies(j + 1, k), copies(1, j))) {
        lmi.add_entry(p, blk_ppt[j - 1], row, col, v);
      }
    }
  }
  lmi.add_equality(trace_terms, 1.0);

  const auto res = lmi.solve(options);
  BenchmarkResult out = finish(res, k, lmi);
  const double root = std::clamp(res.value, 0.0, 1.0);
  out.value = root * root;
  return out;
}

SwapObjective benchmark2_objective(const DensityMatrix& rho, const BipartiteSplit& split) {
  const DensityMatrix ordered = ordered_bipartite(rho, split);
  const std::size_t da = ordered.layout().dim_of(split.a);
  const std::size_t db = ordered.layout().dim_of(split.b);
  const std::size_t r = std::max<std::size_t>(1, numerical_rank(ordered.matrix()));
  const Layout ab({{"A", da}, {"B", db}});
  const DensityMatrix relabelled(ordered.matrix(), ab);
  const PureState psi = purify(relabelled, "R", r);

  const Matrix psi_r = reduced_state(psi, {"R"}).matrix();
  const Matrix psi_ra = reduced_state(psi, {"R", "A"}).matrix();
  const Layout ra({{"R", r}, {"A", da}});
  SwapObjective out;
  out.omega = 0.5 * (tensor(Matrix(psi_r.transpose()), identity(da)) + partial_transpose(psi_ra, ra, {"R"}));
  out.omega = hermitian_part(out.omega);
  out.layout = Layout({{"R", r}, {"A'", da}});

  const Support sup = support_of(ordered.matrix());
  out.schmidt.assign(sup.values.data(), sup.values.data() + std::min<Eigen::Index>(sup.values.size(), static_cast<Eigen::Index>(r)));
  out.vectors = sup.vectors;
  return out;
}

BenchmarkResult benchmark2(const DensityMatrix& rho, const BipartiteSplit& split, std::size_t k,
                           const SdpOptions& options) {
  check_extension(k);
  const SwapObjective objective = benchmark2_objective(rho, split);
  const std::size_t r = objective.layout.at(0).dim;
  const std::size_t da = objective.layout.at(1).dim;
  const std::size_t tail = ipow(da, k - 1);
  const std::size_t dg = r * da * tail;
  check_dims((k + 1) * dg);

  LmiBuilder lmi;
  const auto blk_g = lmi.add_block("choi", dg);
  std::vector<std::size_t> blk_ppt;
  for (std::size_t j = 1; j <= k; ++j) blk_ppt.push_back(lmi.add_block("ppt" + std::to_string(j), dg));

  const Layout layout = extension_layout(r, da, k);
  const std::size_t dx = da * tail;  // dimension of all copies together
  // Tr_{copies} constraints, one real equation per (s <= t) part.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<int, double>>> re_eq;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<int, double>>> im_eq;

  for (const auto& e : symmetric_hermitian_basis(r, da, k)) {
    const int p = lmi.add_param();
    double obj = 0.0;
    std::map<std::pair<std::size_t, std::size_t>, cplx> partial;
    for (const auto& [row, col, v] : e.entries) {
      lmi.add_entry(p, blk_g, row, col, v);
      // Tr[E (Omega (x) I)]: needs (Omega (x) I)(col, row).
      if (col % tail == row % tail) {
        obj += (v * objective.omega(static_cast<Eigen::Index>(col / tail), static_cast<Eigen::Index>(row / tail))).real();
      }
      if (row % dx == col % dx) partial[{row / dx, col / dx}] += v;
    }
    if (obj != 0.0) lmi.add_objective(p, obj);
    for (const auto& [st, v] : partial) {
      if (st.first > st.second) continue;
      if (v.real() != 0.0) re_eq[st].emplace_back(p, v.real());
      if (st.first < st.second && v.imag() != 0.0) im_eq[st].emplace_back(p, v.imag());
    }
    for (std::size_t j = 1; j <= k; ++j) {
      for (const auto& [row, col, v] : map_entries(e.entries, layout, {}, copies(1, j))) {
        lmi.add_entry(p, blk_ppt[j - 1], row, col, v);
      }
    }
  }
  for (std::size_t s = 0; s < r; ++s) {
    for (std::size_t t = s; t < r; ++t) {
      lmi.add_equality(re_eq[{s, t}], s == t ? 1.0 : 0.0);
      if (s < t) lmi.add_equality(im_eq[{s, t}], 0.0);
    }
  }

  const auto res = lmi.solve(options);
  BenchmarkResult out = finish(res, k, lmi);
  out.value = std::clamp(2.0 * res.value - 1.0, 0.0, 1.0);
  return out;
}

FsBracket bound_gap1(std::size_t dim_b, std::size_t k, double value) {
  if (k < 1) throw ConfigError("bound_gap1: k must be positive");
  const double v = std::clamp(value, 0.0, 1.0);
  const double d = static_cast<double>(dim_b * dim_b) / static_cast<double>(k);
  FsBracket out;
  out.upper = v;
  if (d >= 1.0) {
    out.vacuous = true;
    out.lower = 0.0;
    out.benchmark_upper = 1.0;
    return out;
  }
  const double eps = 2.0 * std::sqrt(d * (1.0 - d));
  const double s = std::sqrt(1.0 - v) + eps;
  out.lower = std::max(0.0, 1.0 - s * s);
  const double t = std::max(0.0, std::sqrt(1.0 - v) - eps);
  out.benchmark_upper = 1.0 - t * t;
  return out;
}

}  // namespace steerfid
