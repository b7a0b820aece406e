#pragma once

// Two-evaluation simultaneous perturbation stochastic approximation.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "steerfid/rng.hpp"

namespace steerfid {

struct SpsaConfig {
  double a = 2.0;
  double c = 0.2;
  // Stability constant; negative means iterations / 10.
  double A = -1.0;
  double alpha = 0.602;
  double gamma = 0.101;
  std::size_t iterations = 300;
  // Evaluate the two perturbed points concurrently (bounded by worker_count()).
  bool parallel = true;
};

struct SpsaRecord {
  std::size_t iteration = 0;
  double value = 0.0;       // mean of the two perturbed evaluations
  double best_value = 0.0;  // running minimum of `value`
  std::uint64_t params_hash = 0;
};

struct SpsaResult {
  std::vector<SpsaRecord> records;
  std::vector<double> final_params;
  std::vector<double> best_params;
  // Exact value at best_params when an exact evaluator was supplied,
  // otherwise the trace estimate that selected it.
  double best_value = 0.0;
  double final_value = 0.0;
};

// Noisy objective; the generator is a per-evaluation stream.
using NoisyObjective = std::function<double(std::span<const double>, CounterRng&)>;
using ExactObjective = std::function<double(std::span<const double>)>;

// Minimizes `objective` starting from theta0. When `exact` is given, the final
// iterate and the running-best iterate are re-evaluated with it and the lower
// one is returned as best.
SpsaResult spsa_minimize(const NoisyObjective& objective, std::vector<double> theta0, const SpsaConfig& cfg,
                         std::uint64_t seed, const ExactObjective& exact = nullptr);

// FNV-1a over the IEEE bytes of a parameter vector.
std::uint64_t hash_params(std::span<const double> params);

}  // namespace steerfid
