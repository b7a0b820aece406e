#include "steerfid/vqsa.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "steerfid/errors.hpp"
#include "internal.hpp"
#include "steerfid/random_states.hpp"

namespace steerfid {

namespace {

using detail::as_matrix;
using detail::free_label;
using detail::ordered_state;

Matrix kron_all(const std::vector<Matrix>& factors) {
  Matrix out = Matrix::Identity(1, 1);
  for (const auto& f : factors) out = tensor(out, f);
  return out;
}

}  // namespace

SteeringProblem::SteeringProblem(const DensityMatrix& rho, std::vector<Labels> partitions, std::size_t ref_dim,
                                 std::size_t layers_w, std::size_t layers_u)
    : psi_(PureState::basis(Layout({{"_", 1}}), 0)) {
  if (layers_w < 1 || layers_u < 1) throw ConfigError("circuit layer counts must be positive");
  const DensityMatrix ordered = ordered_state(rho, partitions);
  if (ref_dim == 0) ref_dim = default_ref_dim(ordered);
  const std::size_t n_r = qubit_count(ref_dim);
  psi_ = purify(ordered, free_label(ordered.layout(), "R"), ref_dim);
  dim_r_ = ref_dim;
  psi_mat_ = as_matrix(psi_, dim_r_);
  w_circ_ = ParamCircuit{n_r, layers_w, true};

  for (std::size_t i = 0; i + 1 < partitions.size(); ++i) {
    std::size_t n_i = 0;
    for (const auto& l : partitions[i]) {
      if (ordered.layout().dim_of(l) != 2) throw ConfigError("conditional party subsystem " + l + " is not a qubit");
      ++n_i;
    }
    u_circs_.push_back(ParamCircuit{n_i, layers_u, true});
    party_dims_.push_back(std::size_t{1} << n_i);
    dim_cond_ *= party_dims_.back();
    n_measured_ += n_i;
    u_width_ += u_circs_.back().num_params();
  }
  dim_last_ = ordered.layout().dim_of(partitions.back());
}

OutcomeTable SteeringProblem::outcome_table(std::span<const double> joint) const {
  if (joint.size() != num_params()) throw ShapeError("joint parameter vector has the wrong length");
  return OutcomeTable::from_joint(joint.subspan(w_param_count()), dim_r_, u_width_);
}

std::vector<double> SteeringProblem::joint_params(std::span<const double> w, const OutcomeTable& table) const {
  std::vector<double> out(w.begin(), w.end());
  const auto rest = table.to_joint(dim_r_);
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

std::vector<double> SteeringProblem::outcome_probs(std::span<const double> w) const {
  const Matrix steered = hea_unitary(w_circ_, w) * psi_mat_;
  std::vector<double> q(dim_r_);
  for (std::size_t x = 0; x < dim_r_; ++x) q[x] = steered.row(static_cast<Eigen::Index>(x)).squaredNorm();
  return q;
}

SteeringProblem::Branches SteeringProblem::branches(std::span<const double> w, const OutcomeTable& table,
                                                    bool need_local) const {
  if (table.width() != u_width_) throw ShapeError("outcome table width does not match the conditional circuits");
  const Matrix steered = hea_unitary(w_circ_, w) * psi_mat_;
  Branches b;
  b.q.assign(dim_r_, 0.0);
  b.accept.assign(dim_r_, 0.0);
  if (need_local) b.zero_prob.assign(dim_r_, std::vector<double>(n_measured_, 0.0));
  const auto dc = static_cast<Eigen::Index>(dim_cond_);
  const auto dl = static_cast<Eigen::Index>(dim_last_);

  for (std::size_t x = 0; x < dim_r_; ++x) {
    const auto row = steered.row(static_cast<Eigen::Index>(x));
    const double q = row.squaredNorm();
    b.q[x] = q;
    if (q < kBranchCutoff) continue;
    Matrix v(dc, dl);
    for (Eigen::Index c = 0; c < dc; ++c) v.row(c) = row.segment(c * dl, dl);

    const auto params = table.params(x);
    std::vector<Matrix> us;
    std::size_t offset = 0;
    for (const auto& circ : u_circs_) {
      us.push_back(hea_unitary(circ, params.subspan(offset, circ.num_params())));
      offset += circ.num_params();
    }
    if (!need_local) {
      std::vector<Matrix> rows;
      for (const auto& u : us) rows.push_back(u.row(0));
      const Matrix amp = kron_all(rows) * v;
      b.accept[x] = amp.squaredNorm() / q;
      continue;
    }
    const Matrix rotated = kron_all(us) * v;
    std::vector<double> norms(dim_cond_);
    for (std::size_t c = 0; c < dim_cond_; ++c) norms[c] = rotated.row(static_cast<Eigen::Index>(c)).squaredNorm();
    b.accept[x] = norms[0] / q;
    for (std::size_t j = 0; j < n_measured_; ++j) {
      const std::size_t mask = std::size_t{1} << (n_measured_ - 1 - j);
      double z = 0.0;
      for (std::size_t c = 0; c < dim_cond_; ++c) {
        if ((c & mask) == 0U) z += norms[c];
      }
      b.zero_prob[x][j] = z / q;
    }
  }
  return b;
}

RewardPair SteeringProblem::exact(std::span<const double> w, const OutcomeTable& table) const {
  const Branches b = branches(w, table, true);
  RewardPair r;
  r.n = n_measured_;
  for (std::size_t x = 0; x < dim_r_; ++x) {
    if (b.q[x] < kBranchCutoff) continue;
    r.global += b.q[x] * b.accept[x];
    double z = 0.0;
    for (double p : b.zero_prob[x]) z += p;
    r.local += b.q[x] * z / static_cast<double>(n_measured_);
  }
  return r;
}

RewardPair SteeringProblem::exact(std::span<const double> joint) const {
  return exact(joint.first(w_param_count()), outcome_table(joint));
}

double SteeringProblem::sampled(std::span<const double> joint, RewardKind kind, std::size_t shots,
                                CounterRng& rng) const {
  if (shots == 0) throw ConfigError("shots must be positive");
  const bool local = kind == RewardKind::local;
  const Branches b = branches(joint.first(w_param_count()), outcome_table(joint), local);
  std::vector<double> cumulative(dim_r_);
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t x = 0; x < dim_r_; ++x) {
    if (b.q[x] >= kBranchCutoff) {
      acc += b.q[x];
      last = x;
    }
    cumulative[x] = acc;
  }
  std::size_t accepted = 0;
  for (std::size_t s = 0; s < shots; ++s) {
    const double u = rng.uniform() * acc;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t x = it == cumulative.end() ? last : static_cast<std::size_t>(it - cumulative.begin());
    double p = b.accept[x];
    if (local) p = b.zero_prob[x][rng.below(n_measured_)];
    if (rng.uniform() < p) ++accepted;
  }
  return static_cast<double>(accepted) / static_cast<double>(shots);
}

double global_reward(const SteeringProblem& problem, std::span<const double> w, const OutcomeTable& table,
                     const VqsaConfig& cfg, CounterRng& rng) {
  if (!cfg.shots) return problem.exact(w, table).global;
  return problem.sampled(problem.joint_params(w, table), RewardKind::global, *cfg.shots, rng);
}

double local_reward(const SteeringProblem& problem, std::span<const double> w, const OutcomeTable& table,
                    const VqsaConfig& cfg, CounterRng& rng) {
  if (!cfg.shots) return problem.exact(w, table).local;
  return problem.sampled(problem.joint_params(w, table), RewardKind::local, *cfg.shots, rng);
}

namespace {

VqsaTrace run_once(const SteeringProblem& problem, const VqsaConfig& cfg) {
  std::mutex observer_lock;
  const auto exact_reward = [&](std::span<const double> joint) {
    const RewardPair r = problem.exact(joint);
    if (cfg.on_exact_eval) {
      const std::lock_guard<std::mutex> lock(observer_lock);
      cfg.on_exact_eval(r);
    }
    return cfg.reward == RewardKind::global ? r.global : r.local;
  };
  const NoisyObjective objective = [&](std::span<const double> joint, CounterRng& rng) {
    if (!cfg.shots) return -exact_reward(joint);
    return -problem.sampled(joint, cfg.reward, *cfg.shots, rng);
  };
  const ExactObjective exact = [&](std::span<const double> joint) { return -exact_reward(joint); };

  if (!(cfg.init_spread >= 0.0)) throw ConfigError("init_spread must be non-negative");
  std::vector<double> theta0(problem.num_params(), 0.0);
  if (cfg.init_spread > 0.0) {
    // Stream tag keeps the start independent of the optimizer's own streams.
    CounterRng init = CounterRng(cfg.seed).split(0x1a17ULL << 32);
    for (auto& t : theta0) t = cfg.init_spread * (2.0 * init.uniform() - 1.0);
  }
  const SpsaResult res = spsa_minimize(objective, std::move(theta0), cfg.spsa, cfg.seed, exact);
  VqsaTrace trace;
  trace.records.reserve(res.records.size());
  for (const auto& r : res.records) trace.records.push_back({r.iteration, -r.value, -r.best_value, r.params_hash});
  trace.best_reward = -res.best_value;
  trace.final_reward = -res.final_value;
  trace.best_params = res.best_params;
  return trace;
}

}  // namespace

VqsaTrace run_vqsa(const DensityMatrix& rho, const std::vector<Labels>& partitions, const VqsaConfig& cfg) {
  if (cfg.restarts < 1) throw ConfigError("VQSA restarts must be at least 1");
  const SteeringProblem problem(rho, partitions, cfg.ref_dim, cfg.layers_w, cfg.layers_u);
  VqsaTrace best = run_once(problem, cfg);
  for (std::size_t r = 1; r < cfg.restarts; ++r) {
    VqsaConfig sub = cfg;
    sub.seed = CounterRng(cfg.seed).split(r).key();
    VqsaTrace t = run_once(problem, sub);
    if (t.best_reward > best.best_reward) best = std::move(t);
  }
  return best;
}

VqsaTrace run_vqsa(const NamedStateSpec& spec, const std::vector<Labels>& partitions, const VqsaConfig& cfg) {
  return run_vqsa(build_state(spec), partitions, cfg);
}

// ---------------------------------------------------------------------------
// Entanglement-breaking channel acceptance

void EbChannelSpec::validate(std::size_t ref_dim, const std::vector<std::size_t>& party_dims) const {
  if (povm.empty()) throw ConfigError("EB spec: empty POVM");
  if (preps.size() != povm.size()) throw ConfigError("EB spec: one preparation per POVM element required");
  Matrix total = Matrix::Zero(static_cast<Eigen::Index>(ref_dim), static_cast<Eigen::Index>(ref_dim));
  for (std::size_t x = 0; x < povm.size(); ++x) {
    const Matrix& mu = povm[x];
    if (static_cast<std::size_t>(mu.rows()) != ref_dim || mu.rows() != mu.cols()) {
      throw ConfigError("EB spec: POVM element " + std::to_string(x) + " has the wrong dimension");
    }
    if (!is_hermitian(mu, kStateTolerance)) throw ConfigError("EB spec: POVM element is not Hermitian");
    const auto eig = eigh(hermitian_part(mu));
    if (eig.values(0) < -kStateTolerance) throw ConfigError("EB spec: POVM element is not PSD");
    if (eig.values.size() > 1 && eig.values(eig.values.size() - 2) > kStateTolerance) {
      throw ConfigError("EB spec: POVM element " + std::to_string(x) + " is not rank one");
    }
    total += mu;
    if (preps[x].size() != party_dims.size()) throw ConfigError("EB spec: wrong number of prepared states");
    for (std::size_t i = 0; i < party_dims.size(); ++i) {
      if (static_cast<std::size_t>(preps[x][i].size()) != party_dims[i]) throw ConfigError("EB spec: prepared state dimension");
      if (std::abs(preps[x][i].norm() - 1.0) > kStateTolerance) throw ConfigError("EB spec: prepared state not normalized");
    }
  }
  if ((total - identity(ref_dim)).cwiseAbs().maxCoeff() > kStateTolerance) {
    throw ConfigError("EB spec: POVM elements do not sum to the identity");
  }
}

EbAcceptance eb_acceptance_detail(const DensityMatrix& rho, const std::vector<Labels>& partitions,
                                  const EbChannelSpec& eb) {
  if (eb.povm.empty()) throw ConfigError("EB spec: empty POVM");
  const DensityMatrix ordered = ordered_state(rho, partitions);
  std::vector<std::size_t> party_dims;
  std::size_t dc = 1;
  for (std::size_t i = 0; i + 1 < partitions.size(); ++i) {
    party_dims.push_back(ordered.layout().dim_of(partitions[i]));
    dc *= party_dims.back();
  }
  const std::size_t dl = ordered.layout().dim_of(partitions.back());
  const auto ref_dim = static_cast<std::size_t>(eb.povm.front().rows());
  eb.validate(ref_dim, party_dims);

  const PureState psi = purify(ordered, free_label(ordered.layout(), "R"), ref_dim);
  const Matrix big_psi = as_matrix(psi, ref_dim);
  const auto n_cond = static_cast<Eigen::Index>(dc);
  const auto n_last = static_cast<Eigen::Index>(dl);
  const auto n_ab = n_cond * n_last;

  // omega on [A', conditional parties, last party].
  Matrix omega = Matrix::Zero(n_cond * n_ab, n_cond * n_ab);
  double overlap_sum = 0.0;
  for (std::size_t x = 0; x < eb.povm.size(); ++x) {
    const Matrix tau = big_psi.transpose() * eb.povm[x].transpose() * big_psi.conjugate();
    Vector phi = Vector::Ones(1);
    for (const auto& v : eb.preps[x]) phi = tensor(phi, v);
    const Matrix tau_a = partial_trace(tau, Layout({{"C", dc}, {"L", dl}}), {"C"});
    overlap_sum += (phi.adjoint() * tau_a * phi)(0, 0).real();
    omega += tensor(Matrix(phi * phi.adjoint()), tau);
  }
  const Matrix pi = tensor(symmetric_projector(dc), identity(dl));
  EbAcceptance out;
  out.direct = (pi * omega).trace().real();
  out.expansion = 0.5 * (1.0 + overlap_sum);
  return out;
}

double eb_acceptance(const DensityMatrix& rho, const std::vector<Labels>& partitions, const EbChannelSpec& eb) {
  return eb_acceptance_detail(rho, partitions, eb).direct;
}

EbChannelSpec random_eb_spec(std::size_t ref_dim, std::size_t outcomes, const std::vector<std::size_t>& party_dims,
                             CounterRng& rng) {
  if (outcomes < ref_dim) throw CapacityError("random_eb_spec: need at least ref_dim outcomes");
  const Matrix v = random_isometry(outcomes, ref_dim, rng);
  EbChannelSpec eb;
  for (std::size_t x = 0; x < outcomes; ++x) {
    const Vector m = v.row(static_cast<Eigen::Index>(x)).adjoint();
    eb.povm.push_back(m * m.adjoint());
    std::vector<Vector> preps;
    for (auto d : party_dims) preps.push_back(random_pure_state(Layout({{"P", d}}), rng).amplitudes());
    eb.preps.push_back(std::move(preps));
  }
  return eb;
}

double pure_state_test(const PureState& psi, const Labels& a_labels) {
  return 0.5 * (1.0 + spectral_norm(reduced_state(psi, a_labels).matrix()));
}

}  // namespace steerfid
