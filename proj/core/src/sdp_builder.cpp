#include <cmath>

#include "steerfid/errors.hpp"
#include "steerfid/sdp.hpp"

namespace steerfid {

namespace {

constexpr double kPivotTol = 1e-12;
constexpr double kDropTol = 1e-15;

}  // namespace

std::size_t LmiBuilder::add_block(std::string name, std::size_t complex_dim) {
  if (complex_dim == 0) throw ShapeError("LMI block " + name + " has dimension 0");
  blocks_.emplace_back(std::move(name), complex_dim);
  return blocks_.size() - 1;
}

int LmiBuilder::add_param() {
  ops_.emplace_back();
  return static_cast<int>(num_params_++);
}

int LmiBuilder::add_params(std::size_t count) {
  const int first = static_cast<int>(num_params_);
  for (std::size_t i = 0; i < count; ++i) add_param();
  return first;
}

std::size_t LmiBuilder::complex_dim_sum() const {
  std::size_t s = 0;
  for (const auto& b : blocks_) s += b.second;
  return s;
}

void LmiBuilder::add_entry(int param, std::size_t block, std::size_t row, std::size_t col, cplx value) {
  if (block >= blocks_.size() || row >= blocks_[block].second || col >= blocks_[block].second) {
    throw ShapeError("LMI entry outside block " + std::to_string(block));
  }
  if (param < kConstant || param >= static_cast<int>(num_params_)) throw ShapeError("LMI entry for unknown parameter");
  Operator& op = param == kConstant ? constant_ : ops_[static_cast<std::size_t>(param)];
  op[{block, row, col}] += value;
}

void LmiBuilder::add_hermitian(int param, std::size_t block, std::size_t row, std::size_t col, cplx value) {
  if (row == col) {
    add_entry(param, block, row, col, value.real());
    return;
  }
  add_entry(param, block, row, col, value);
  add_entry(param, block, col, row, std::conj(value));
}

void LmiBuilder::add_objective(int param, double coefficient) {
  if (param < 0 || param >= static_cast<int>(num_params_)) throw ShapeError("objective for unknown parameter");
  objective_[param] += coefficient;
}

void LmiBuilder::add_equality(const std::vector<std::pair<int, double>>& terms, double rhs) {
  std::map<int, double> row;
  for (const auto& [p, c] : terms) {
    if (p < 0 || p >= static_cast<int>(num_params_)) throw ShapeError("equality for unknown parameter");
    row[p] += c;
  }
  equalities_.emplace_back(std::move(row), rhs);
}

LmiBuilder::Reduced LmiBuilder::reduce() const {
  // Reduced row echelon form of E p = f, built one row at a time.
  std::map<int, std::pair<std::map<int, double>, double>> rref;
  for (const auto& [terms, rhs0] : equalities_) {
    std::map<int, double> row = terms;
    double rhs = rhs0;
    for (const auto& [pv, prow] : rref) {
      const auto it = row.find(pv);
      if (it == row.end()) continue;
      const double f = it->second;
      for (const auto& [q, c] : prow.first) row[q] -= f * c;
      rhs -= f * prow.second;
      row.erase(pv);
    }
    int pivot = -1;
    double best = kPivotTol;
    for (const auto& [q, c] : row) {
      if (std::abs(c) > best) {
        best = std::abs(c);
        pivot = q;
      }
    }
    if (pivot < 0) {
      if (std::abs(rhs) > 1e-9) throw ConfigError("LMI equality constraints are inconsistent");
      continue;
    }
    const double scale = row[pivot];
    std::map<int, double> norm;
    for (const auto& [q, c] : row) {
      if (std::abs(c) > kDropTol * std::abs(scale)) norm[q] = c / scale;
    }
    norm[pivot] = 1.0;
    rhs /= scale;
    for (auto& [pv, prow] : rref) {
      const auto it = prow.first.find(pivot);
      if (it == prow.first.end()) continue;
      const double f = it->second;
      for (const auto& [q, c] : norm) prow.first[q] -= f * c;
      prow.second -= f * rhs;
      prow.first.erase(pivot);
    }
    rref.emplace(pivot, std::make_pair(std::move(norm), rhs));
  }

  Reduced r;
  std::vector<int> free_index(num_params_, -1);
  for (std::size_t p = 0; p < num_params_; ++p) {
    if (rref.count(static_cast<int>(p)) != 0) continue;
    free_index[p] = static_cast<int>(r.free_params.size());
    r.free_params.push_back(static_cast<int>(p));
  }
  r.ops.resize(r.free_params.size());
  r.objective.assign(r.free_params.size(), 0.0);
  for (std::size_t k = 0; k < r.free_params.size(); ++k) {
    r.ops[k] = ops_[static_cast<std::size_t>(r.free_params[k])];
    const auto it = objective_.find(r.free_params[k]);
    if (it != objective_.end()) r.objective[k] = it->second;
  }
  r.constant = constant_;

  for (const auto& [pv, prow] : rref) {
    // p_pv = rhs - sum_{q != pv} c_q p_q
    std::map<int, double> coeffs;
    for (const auto& [q, c] : prow.first) {
      if (q != pv) coeffs[q] = -c;
    }
    r.pivots[pv] = {prow.second, coeffs};
    const Operator& op = ops_[static_cast<std::size_t>(pv)];
    const auto obj = objective_.find(pv);
    const double obj_c = obj == objective_.end() ? 0.0 : obj->second;
    for (const auto& [key, v] : op) r.constant[key] += prow.second * v;
    r.objective_constant += obj_c * prow.second;
    for (const auto& [q, c] : coeffs) {
      const int k = free_index[static_cast<std::size_t>(q)];
      for (const auto& [key, v] : op) r.ops[static_cast<std::size_t>(k)][key] += c * v;
      r.objective[static_cast<std::size_t>(k)] += obj_c * c;
    }
  }
  return r;
}

namespace {

// Realified upper triangle of a Hermitian operator; throws on non-Hermitian input.
template <typename Op>
SparseSym realify(const Op& op, const std::vector<std::pair<std::string, std::size_t>>& blocks, double sign) {
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, double> acc;
  for (const auto& [key, v] : op) {
    const auto [b, r, c] = key;
    const auto mirror = op.find({b, c, r});
    const cplx mv = mirror == op.end() ? cplx(0.0) : mirror->second;
    if (std::abs(mv - std::conj(v)) > 1e-9 * (1.0 + std::abs(v))) {
      throw ShapeError("LMI block " + blocks[b].first + " is not Hermitian at (" + std::to_string(r) + "," +
                       std::to_string(c) + ")");
    }
    const std::size_t n = blocks[b].second;
    const auto put = [&](std::size_t rr, std::size_t cc, double val) {
      if (rr <= cc) acc[{b, rr, cc}] += sign * val;
    };
    put(r, c, v.real());
    put(r + n, c + n, v.real());
    put(r, c + n, -v.imag());
    put(r + n, c, v.imag());
  }
  SparseSym out;
  for (const auto& [key, v] : acc) {
    if (std::abs(v) <= kDropTol) continue;
    const auto [b, r, c] = key;
    out.push_back({static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c), v});
  }
  return out;
}

}  // namespace

SdpProblem LmiBuilder::to_problem(const Reduced& r) const {
  SdpProblem p;
  for (const auto& [name, dim] : blocks_) p.add_block(name, 2 * dim);
  // Z = sum_k y_k F_k - (-F_0) >= 0 with y = free parameters.
  p.objective = realify(r.constant, blocks_, -1.0);
  for (std::size_t k = 0; k < r.ops.size(); ++k) {
    p.constraints.push_back(realify(r.ops[k], blocks_, 1.0));
    p.rhs.push_back(-r.objective[k]);
  }
  return p;
}

SdpProblem LmiBuilder::realified() const { return to_problem(reduce()); }

LmiBuilder::Result LmiBuilder::solve(const SdpOptions& options) const {
  const Reduced red = reduce();
  Result res;
  std::vector<double> free_values(red.free_params.size(), 0.0);
  if (red.free_params.empty()) {
    // Nothing to optimize; report feasibility of the constant LMI.
    res.solution.status = SdpStatus::optimal;
    res.value = red.objective_constant;
  } else {
    const SdpProblem problem = to_problem(red);
    res.solution = steerfid::solve(problem, options);
    free_values = res.solution.y;
    res.value = -res.solution.dual_value + red.objective_constant;
  }
  res.params.assign(num_params_, 0.0);
  for (std::size_t k = 0; k < red.free_params.size(); ++k) {
    res.params[static_cast<std::size_t>(red.free_params[k])] = free_values[k];
  }
  for (const auto& [pv, expr] : red.pivots) {
    double v = expr.first;
    for (const auto& [q, c] : expr.second) v += c * res.params[static_cast<std::size_t>(q)];
    res.params[static_cast<std::size_t>(pv)] = v;
  }
  return res;
}

}  // namespace steerfid
