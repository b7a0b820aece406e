#include "steerfid/states.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "steerfid/circuits.hpp"
#include "steerfid/errors.hpp"
#include "steerfid/rng.hpp"

namespace steerfid {

PureState bell_state(int which, const std::string& a, const std::string& b) {
  const double h = 1.0 / std::numbers::sqrt2;
  Vector v = Vector::Zero(4);
  switch (which) {
    case 0: v(0) = h; v(3) = h; break;
    case 1: v(0) = h; v(3) = -h; break;
    case 2: v(1) = h; v(2) = h; break;
    case 3: v(1) = h; v(2) = -h; break;
    default: throw ConfigError("bell_state: index must be 0..3");
  }
  return {std::move(v), Layout::qubits({a, b})};
}

PureState ghz_state(const Labels& labels) {
  if (labels.empty()) throw ConfigError("ghz_state: no parties");
  const Layout layout = Layout::qubits(labels);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
  v(0) = 1.0 / std::numbers::sqrt2;
  v(v.size() - 1) = 1.0 / std::numbers::sqrt2;
  return {std::move(v), layout};
}

std::size_t default_ref_dim(const DensityMatrix& rho) {
  const std::size_t rank = std::max<std::size_t>(1, numerical_rank(rho.matrix()));
  std::size_t d = 1;
  while (d < rank) d *= 2;
  return d;
}

PureState purify(const DensityMatrix& rho, const std::string& ref_label, std::size_t ref_dim) {
  const auto eig = eigh(rho.matrix());
  const std::size_t rank = numerical_rank(rho.matrix());
  if (ref_dim < rank) {
    throw CapacityError("purify: reference dimension " + std::to_string(ref_dim) + " is below rank " +
                        std::to_string(rank));
  }
  if (rho.layout().contains(ref_label)) throw ConfigError("purify: label " + ref_label + " already in use");
  const auto d = static_cast<Eigen::Index>(rho.dim());
  Vector amps = Vector::Zero(static_cast<Eigen::Index>(ref_dim) * d);
  for (std::size_t i = 0; i < rank; ++i) {
    const Eigen::Index col = d - 1 - static_cast<Eigen::Index>(i);
    const double lambda = std::max(eig.values(col), 0.0);
    Vector e = eig.vectors.col(col);
    for (Eigen::Index j = 0; j < d; ++j) {
      if (std::abs(e(j)) > 1e-12) {
        e *= std::conj(e(j)) / std::abs(e(j));
        break;
      }
    }
    amps.segment(static_cast<Eigen::Index>(i) * d, d) = std::sqrt(lambda) * e;
  }
  // Discarded eigenvalues below the rank cutoff leave a tiny norm deficit.
  amps.normalize();
  Layout layout = Layout({{ref_label, ref_dim}}).concat(rho.layout());
  return {std::move(amps), std::move(layout)};
}

DensityMatrix depolarize(const DensityMatrix& rho, const std::string& target, double p) {
  if (rho.layout().dim_of(target) != 2) throw ConfigError("depolarize: " + target + " is not a qubit");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("depolarize: p must lie in [0, 1]");
  const IndexSplit split(rho.layout(), {target});
  const Matrix& m = rho.matrix();
  Matrix out = (1.0 - p) * m;
  for (std::size_t r = 0; r < split.rest_dim(); ++r) {
    for (std::size_t c = 0; c < split.rest_dim(); ++c) {
      cplx traced = 0.0;
      for (std::size_t t = 0; t < 2; ++t) {
        traced += m(static_cast<Eigen::Index>(split.compose(t, r)), static_cast<Eigen::Index>(split.compose(t, c)));
      }
      for (std::size_t t = 0; t < 2; ++t) {
        out(static_cast<Eigen::Index>(split.compose(t, r)), static_cast<Eigen::Index>(split.compose(t, c))) +=
            p * 0.5 * traced;
      }
    }
  }
  return {std::move(out), rho.layout()};
}

namespace {

Labels numbered(const std::string& prefix, std::size_t n) {
  Labels out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

DensityMatrix build_unlabelled(const NamedStateSpec& spec) {
  switch (spec.kind) {
    case StateKind::bell_mixture: {
      if (spec.weights.empty() || spec.weights.size() > 4) throw ConfigError("bell_mixture: 1 to 4 weights required");
      double total = 0.0;
      Matrix m = Matrix::Zero(4, 4);
      for (std::size_t i = 0; i < spec.weights.size(); ++i) {
        if (spec.weights[i] < 0.0) throw ConfigError("bell_mixture: negative weight");
        total += spec.weights[i];
        m += spec.weights[i] * bell_state(static_cast<int>(i)).projector();
      }
      if (std::abs(total - 1.0) > 1e-10) throw ConfigError("bell_mixture: weights must sum to 1");
      return {std::move(m), Layout::qubits({"A", "B"})};
    }
    case StateKind::ghz: {
      if (spec.n_parties < 2 || spec.n_parties > 8) throw ConfigError("ghz: 2 to 8 parties supported");
      return DensityMatrix::from_pure(ghz_state(numbered("A", spec.n_parties)));
    }
    case StateKind::depolarized_ghz4: {
      DensityMatrix rho = DensityMatrix::from_pure(ghz_state({"A1", "A2", "B1", "B2"}));
      rho = depolarize(rho, "A1", spec.p);
      return depolarize(rho, "A2", spec.p);
    }
    case StateKind::hea_random: {
      if (spec.n_a < 1 || spec.n_b < 1) throw ConfigError("hea_random: both parties need at least one qubit");
      if (spec.layers < 1) throw ConfigError("hea_random: layers must be positive");
      const ParamCircuit circ{spec.n_a + spec.n_b, spec.layers, spec.entangling};
      if (circ.n_qubits > 8) throw ConfigError("hea_random: at most 8 qubits");
      CounterRng rng(spec.seed);
      std::vector<double> angles(circ.num_params());
      for (auto& a : angles) a = 2.0 * std::numbers::pi * rng.uniform();
      Labels labels = numbered("A", spec.n_a);
      const Labels b = numbered("B", spec.n_b);
      labels.insert(labels.end(), b.begin(), b.end());
      const Matrix u = hea_unitary(circ, angles);
      return DensityMatrix::from_pure(PureState(u.col(0), Layout::qubits(labels)));
    }
    case StateKind::explicit_matrix:
      if (!spec.matrix) throw ConfigError("explicit state without a matrix");
      return *spec.matrix;
  }
  throw ConfigError("unknown state kind");
}

}  // namespace

DensityMatrix build_state(const NamedStateSpec& spec) {
  DensityMatrix rho = build_unlabelled(spec);
  if (!spec.layout) return rho;
  if (spec.layout->size() != rho.layout().size()) throw ConfigError("state layout override has the wrong arity");
  for (std::size_t i = 0; i < spec.layout->size(); ++i) {
    if (spec.layout->at(i).dim != rho.layout().at(i).dim) throw ConfigError("state layout override has wrong dims");
  }
  return {rho.matrix(), *spec.layout};
}

std::vector<Labels> default_partitions(const NamedStateSpec& spec) {
  if (spec.layout) {
    std::vector<Labels> out;
    for (const auto& s : spec.layout->subsystems()) out.push_back({s.label});
    return out;
  }
  switch (spec.kind) {
    case StateKind::bell_mixture: return {{"A"}, {"B"}};
    case StateKind::ghz: {
      std::vector<Labels> out;
      for (const auto& l : numbered("A", spec.n_parties)) out.push_back({l});
      return out;
    }
    case StateKind::depolarized_ghz4: return {{"A1", "A2"}, {"B1", "B2"}};
    case StateKind::hea_random: return {numbered("A", spec.n_a), numbered("B", spec.n_b)};
    case StateKind::explicit_matrix: {
      if (!spec.matrix) throw ConfigError("explicit_matrix state without a matrix");
      std::vector<Labels> out;
      for (const auto& s : spec.matrix->layout().subsystems()) out.push_back({s.label});
      return out;
    }
  }
  return {};
}

namespace {

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw ConfigError("");
    } catch (const std::exception&) {
      throw ConfigError("cannot parse number '" + item + "' in state name");
    }
  }
  return out;
}

}  // namespace

NamedStateSpec parse_state_name(const std::string& name) {
  const auto colon = name.find(':');
  const std::string kind = name.substr(0, colon);
  const std::vector<double> args = colon == std::string::npos ? std::vector<double>{} : parse_numbers(name.substr(colon + 1));
  NamedStateSpec spec;
  if (kind == "bell_mixture") {
    spec.kind = StateKind::bell_mixture;
    if (!args.empty()) spec.weights = args;
  } else if (kind == "ghz") {
    spec.kind = StateKind::ghz;
    if (args.size() > 1) throw ConfigError("ghz takes one argument");
    if (!args.empty()) spec.n_parties = static_cast<std::size_t>(args[0]);
  } else if (kind == "depolarized_ghz4") {
    spec.kind = StateKind::depolarized_ghz4;
    if (args.size() > 1) throw ConfigError("depolarized_ghz4 takes one argument");
    if (!args.empty()) spec.p = args[0];
  } else if (kind == "hea_random" || kind == "product") {
    spec.kind = StateKind::hea_random;
    spec.entangling = kind == "hea_random";
    spec.n_a = 2;
    spec.n_b = 2;
    if (args.size() > 5) throw ConfigError(kind + " takes at most five arguments");
    if (args.size() > 0) spec.seed = static_cast<std::uint64_t>(args[0]);
    if (args.size() > 1) spec.layers = static_cast<std::size_t>(args[1]);
    if (args.size() > 2) spec.entangling = args[2] != 0.0;
    if (args.size() > 3) spec.n_a = static_cast<std::size_t>(args[3]);
    if (args.size() > 4) spec.n_b = static_cast<std::size_t>(args[4]);
  } else {
    throw ConfigError("unknown state name '" + kind + "'");
  }
  return spec;
}

}  // namespace steerfid
