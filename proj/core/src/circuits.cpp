#include "steerfid/circuits.hpp"

#include <algorithm>
#include <cmath>

#include "steerfid/errors.hpp"

namespace steerfid {

namespace {

// Left-multiplies `u` by the 2x2 gate `g` acting on `qubit` of `n` qubits.
void apply_1q_rows(Matrix& u, const Matrix& g, std::size_t n, std::size_t qubit) {
  const std::size_t mask = std::size_t{1} << (n - 1 - qubit);
  const auto dim = static_cast<std::size_t>(u.rows());
  for (std::size_t i0 = 0; i0 < dim; ++i0) {
    if ((i0 & mask) != 0U) continue;
    const auto r0 = static_cast<Eigen::Index>(i0);
    const auto r1 = static_cast<Eigen::Index>(i0 | mask);
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      const cplx a = u(r0, c);
      const cplx b = u(r1, c);
      u(r0, c) = g(0, 0) * a + g(0, 1) * b;
      u(r1, c) = g(1, 0) * a + g(1, 1) * b;
    }
  }
}

void apply_cnot_rows(Matrix& u, std::size_t n, std::size_t control, std::size_t target) {
  const std::size_t cmask = std::size_t{1} << (n - 1 - control);
  const std::size_t tmask = std::size_t{1} << (n - 1 - target);
  const auto dim = static_cast<std::size_t>(u.rows());
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & cmask) != 0U && (i & tmask) == 0U) {
      u.row(static_cast<Eigen::Index>(i)).swap(u.row(static_cast<Eigen::Index>(i | tmask)));
    }
  }
}

}  // namespace

Matrix rx(double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  Matrix g(2, 2);
  g << c, cplx(0.0, -s), cplx(0.0, -s), c;
  return g;
}

Matrix ry(double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  Matrix g(2, 2);
  g << c, -s, s, c;
  return g;
}

Matrix cnot(std::size_t n_qubits, std::size_t control, std::size_t target) {
  if (control >= n_qubits || target >= n_qubits || control == target) throw ConfigError("cnot: bad qubit indices");
  Matrix u = identity(std::size_t{1} << n_qubits);
  apply_cnot_rows(u, n_qubits, control, target);
  return u;
}

Matrix hea_unitary(const ParamCircuit& circuit, std::span<const double> params) {
  if (params.size() != circuit.num_params()) {
    throw ShapeError("hea_unitary: expected " + std::to_string(circuit.num_params()) + " parameters, got " +
                     std::to_string(params.size()));
  }
  const std::size_t n = circuit.n_qubits;
  Matrix u = identity(std::size_t{1} << n);
  std::size_t k = 0;
  for (std::size_t layer = 0; layer < circuit.layers; ++layer) {
    for (std::size_t q = 0; q < n; ++q) {
      apply_1q_rows(u, rx(params[k]), n, q);
      apply_1q_rows(u, ry(params[k + 1]), n, q);
      k += 2;
    }
    if (circuit.entangling) {
      for (std::size_t q = 0; q + 1 < n; ++q) apply_cnot_rows(u, n, q, q + 1);
    }
  }
  return u;
}

std::size_t qubit_count(std::size_t dim) {
  if (dim == 0 || (dim & (dim - 1)) != 0) {
    throw ConfigError("dimension " + std::to_string(dim) + " is not a power of two");
  }
  std::size_t n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  return n;
}

PureState apply_to_subsystem(const PureState& state, const Matrix& u, const Labels& targets) {
  const IndexSplit split(state.layout(), targets);
  if (static_cast<std::size_t>(u.rows()) != split.selected_dim() || u.rows() != u.cols()) {
    throw ShapeError("apply_to_subsystem: operator is " + std::to_string(u.rows()) + "x" + std::to_string(u.cols()) +
                     " but targets span dimension " + std::to_string(split.selected_dim()));
  }
  const auto ds = static_cast<Eigen::Index>(split.selected_dim());
  const auto dr = static_cast<Eigen::Index>(split.rest_dim());
  Matrix block(ds, dr);
  for (Eigen::Index s = 0; s < ds; ++s) {
    for (Eigen::Index r = 0; r < dr; ++r) {
      block(s, r) = state.amplitudes()(static_cast<Eigen::Index>(split.compose(static_cast<std::size_t>(s), static_cast<std::size_t>(r))));
    }
  }
  const Matrix evolved = u * block;
  Vector out(state.amplitudes().size());
  for (Eigen::Index s = 0; s < ds; ++s) {
    for (Eigen::Index r = 0; r < dr; ++r) {
      out(static_cast<Eigen::Index>(split.compose(static_cast<std::size_t>(s), static_cast<std::size_t>(r)))) = evolved(s, r);
    }
  }
  // Renormalize away rounding drift so the result satisfies PureState's check.
  out /= out.norm();
  return {std::move(out), state.layout()};
}

namespace {

struct Unnormalized {
  std::vector<double> probs;
  std::vector<Vector> vectors;
};

Unnormalized branch_vectors(const PureState& state, const IndexSplit& split) {
  Unnormalized out;
  out.probs.resize(split.selected_dim());
  out.vectors.resize(split.selected_dim());
  for (std::size_t s = 0; s < split.selected_dim(); ++s) {
    Vector v(static_cast<Eigen::Index>(split.rest_dim()));
    for (std::size_t r = 0; r < split.rest_dim(); ++r) {
      v(static_cast<Eigen::Index>(r)) = state.amplitudes()(static_cast<Eigen::Index>(split.compose(s, r)));
    }
    out.probs[s] = v.squaredNorm();
    out.vectors[s] = std::move(v);
  }
  return out;
}

}  // namespace

std::vector<Branch> measure_branches(const PureState& state, const Labels& measured) {
  const IndexSplit split(state.layout(), measured);
  const Layout rest = state.layout().without(measured);
  auto raw = branch_vectors(state, split);
  std::vector<Branch> out;
  for (std::size_t s = 0; s < raw.probs.size(); ++s) {
    if (raw.probs[s] < kBranchCutoff) continue;
    Vector post = raw.vectors[s] / std::sqrt(raw.probs[s]);
    out.push_back({raw.probs[s], s, PureState(std::move(post), rest)});
  }
  return out;
}

Sample sample_outcome(const PureState& state, const Labels& measured, CounterRng& rng) {
  const IndexSplit split(state.layout(), measured);
  auto raw = branch_vectors(state, split);
  double total = 0.0;
  std::size_t last_valid = 0;
  for (std::size_t s = 0; s < raw.probs.size(); ++s) {
    if (raw.probs[s] < kBranchCutoff) raw.probs[s] = 0.0;
    else last_valid = s;
    total += raw.probs[s];
  }
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t chosen = last_valid;
  for (std::size_t s = 0; s < raw.probs.size(); ++s) {
    acc += raw.probs[s];
    if (raw.probs[s] > 0.0 && u < acc) {
      chosen = s;
      break;
    }
  }
  Vector post = raw.vectors[chosen] / std::sqrt(raw.probs[chosen]);
  return {chosen, PureState(std::move(post), state.layout().without(measured))};
}

std::span<double> OutcomeTable::params_for(std::uint64_t outcome) {
  auto [it, inserted] = table_.try_emplace(outcome, width_, 0.0);
  return it->second;
}

std::span<const double> OutcomeTable::params(std::uint64_t outcome) const {
  const auto it = table_.find(outcome);
  if (it == table_.end()) return zeros_;
  return it->second;
}

OutcomeTable OutcomeTable::from_joint(std::span<const double> joint, std::size_t n_outcomes, std::size_t width) {
  if (joint.size() != n_outcomes * width) throw ShapeError("OutcomeTable::from_joint: size mismatch");
  OutcomeTable t(width);
  for (std::size_t x = 0; x < n_outcomes; ++x) {
    auto dst = t.params_for(x);
    std::copy_n(joint.begin() + static_cast<std::ptrdiff_t>(x * width), width, dst.begin());
  }
  return t;
}

std::vector<double> OutcomeTable::to_joint(std::size_t n_outcomes) const {
  std::vector<double> out;
  out.reserve(n_outcomes * width_);
  for (std::size_t x = 0; x < n_outcomes; ++x) {
    const auto p = params(x);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

}  // namespace steerfid
