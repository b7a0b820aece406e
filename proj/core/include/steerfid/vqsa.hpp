#pragma once

// Variational quantum steering: the purification is steered by a computational
// basis measurement of the reference after W_R(theta); conditioned on outcome x
// every party but the last is rotated by U^{x,i} and the run accepts when all
// of those parties read zero.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "steerfid/circuits.hpp"
#include "steerfid/qcore.hpp"
#include "steerfid/rng.hpp"
#include "steerfid/spsa.hpp"
#include "steerfid/states.hpp"

namespace steerfid {

enum class RewardKind { global, local };

// Exact rewards of one parameter setting. n = number of measured qubits.
struct RewardPair {
  double global = 0.0;
  double local = 0.0;
  std::size_t n = 0;
};

struct VqsaConfig {
  std::size_t layers_w = 2;
  std::size_t layers_u = 2;
  std::optional<std::size_t> shots = 1024;  // nullopt = exact
  SpsaConfig spsa;
  std::uint64_t seed = 0;
  RewardKind reward = RewardKind::global;
  // 0 = states::default_ref_dim. Must be a power of two.
  std::size_t ref_dim = 0;
  // Initial parameters are drawn uniformly from [-init_spread, init_spread]
  // (seeded); 0 starts from the all-zero vector, which is a saddle point of
  // the reward (U = I makes it independent of W and vice versa).
  double init_spread = 3.141592653589793;
  // Independent optimizer runs (restart r > 0 derives its seed from `seed`);
  // the run with the highest exact best reward is returned.
  std::size_t restarts = 1;
  // Called with both exact rewards on every exact-mode evaluation. Calls are
  // serialized by the driver.
  std::function<void(const RewardPair&)> on_exact_eval;
};

struct VqsaRecord {
  std::size_t iteration = 0;
  double reward = 0.0;
  double best_reward = 0.0;
  std::uint64_t params_hash = 0;
};

struct VqsaTrace {
  std::vector<VqsaRecord> records;
  // Exact reward of the selected parameters (final or running-best iterate).
  double best_reward = 0.0;
  double final_reward = 0.0;
  std::vector<double> best_params;
};

class SteeringProblem {
 public:
  // `partitions` lists the parties in order; the last one is never rotated.
  SteeringProblem(const DensityMatrix& rho, std::vector<Labels> partitions, std::size_t ref_dim,
                  std::size_t layers_w, std::size_t layers_u);

  [[nodiscard]] const PureState& purification() const { return psi_; }
  [[nodiscard]] std::size_t ref_dim() const { return dim_r_; }
  [[nodiscard]] std::size_t num_outcomes() const { return dim_r_; }
  [[nodiscard]] const ParamCircuit& w_circuit() const { return w_circ_; }
  [[nodiscard]] const std::vector<ParamCircuit>& u_circuits() const { return u_circs_; }
  // Qubits measured at acceptance (all conditional parties).
  [[nodiscard]] std::size_t measured_qubits() const { return n_measured_; }
  [[nodiscard]] std::size_t w_param_count() const { return w_circ_.num_params(); }
  // Conditional parameters per outcome (all conditional parties).
  [[nodiscard]] std::size_t u_param_count() const { return u_width_; }
  [[nodiscard]] std::size_t num_params() const { return w_param_count() + dim_r_ * u_width_; }

  [[nodiscard]] OutcomeTable outcome_table(std::span<const double> joint) const;
  [[nodiscard]] std::vector<double> joint_params(std::span<const double> w, const OutcomeTable& table) const;

  // Exact global and local rewards.
  [[nodiscard]] RewardPair exact(std::span<const double> w, const OutcomeTable& table) const;
  [[nodiscard]] RewardPair exact(std::span<const double> joint) const;
  // Shot estimate of the chosen reward.
  [[nodiscard]] double sampled(std::span<const double> joint, RewardKind kind, std::size_t shots,
                               CounterRng& rng) const;

  // Outcome probabilities q(x) after W (unpruned).
  [[nodiscard]] std::vector<double> outcome_probs(std::span<const double> w) const;

 private:
  struct Branches {
    std::vector<double> q;          // q(x)
    std::vector<double> accept;     // Pr(all zeros | x)
    std::vector<std::vector<double>> zero_prob;  // Pr(qubit j = 0 | x)
  };
  [[nodiscard]] Branches branches(std::span<const double> w, const OutcomeTable& table, bool need_local) const;

  PureState psi_;
  Matrix psi_mat_;  // dim_r x dim_rest, rest ordered by partition
  std::size_t dim_r_ = 1;
  std::size_t dim_cond_ = 1;
  std::size_t dim_last_ = 1;
  std::size_t n_measured_ = 0;
  std::size_t u_width_ = 0;
  ParamCircuit w_circ_;
  std::vector<ParamCircuit> u_circs_;
  std::vector<std::size_t> party_dims_;
};

// Global reward Sum_x q(x) <0|U^x psi^x U^x dagger|0>; exact when cfg.shots is empty.
double global_reward(const SteeringProblem& problem, std::span<const double> w, const OutcomeTable& table,
                     const VqsaConfig& cfg, CounterRng& rng);
// Average single-qubit zero probability over the measured qubits.
double local_reward(const SteeringProblem& problem, std::span<const double> w, const OutcomeTable& table,
                    const VqsaConfig& cfg, CounterRng& rng);

VqsaTrace run_vqsa(const DensityMatrix& rho, const std::vector<Labels>& partitions, const VqsaConfig& cfg);
VqsaTrace run_vqsa(const NamedStateSpec& spec, const std::vector<Labels>& partitions, const VqsaConfig& cfg);

// Measure-and-prepare channel: rank-one POVM on R and, per outcome, one pure
// state for every conditional party.
struct EbChannelSpec {
  std::vector<Matrix> povm;
  std::vector<std::vector<Vector>> preps;

  // Throws ConfigError when the POVM or preparations are invalid.
  void validate(std::size_t ref_dim, const std::vector<std::size_t>& party_dims) const;
};

struct EbAcceptance {
  double direct = 0.0;     // Tr[Pi_sym E(psi)]
  double expansion = 0.0;  // 1/2 (1 + Sum_x p(x) <phi^x|psi^x|phi^x>)
};

// Both computations of the swap-test acceptance probability; the reference is
// the purification with ref_dim = povm dimension.
EbAcceptance eb_acceptance_detail(const DensityMatrix& rho, const std::vector<Labels>& partitions,
                                  const EbChannelSpec& eb);
double eb_acceptance(const DensityMatrix& rho, const std::vector<Labels>& partitions, const EbChannelSpec& eb);

// Random EB spec: POVM from a Haar isometry with `outcomes` rows.
EbChannelSpec random_eb_spec(std::size_t ref_dim, std::size_t outcomes, const std::vector<std::size_t>& party_dims,
                             CounterRng& rng);

// 1/2 (1 + ||psi_A||_inf) for a bipartite pure state split as (A, rest).
double pure_state_test(const PureState& psi, const Labels& a_labels);

}  // namespace steerfid
