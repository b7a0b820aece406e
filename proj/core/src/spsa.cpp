#include "steerfid/spsa.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "steerfid/errors.hpp"
#include "steerfid/parallel.hpp"

namespace steerfid {

std::uint64_t hash_params(std::span<const double> params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double p : params) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &p, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

SpsaResult spsa_minimize(const NoisyObjective& objective, std::vector<double> theta0, const SpsaConfig& cfg,
                         std::uint64_t seed, const ExactObjective& exact) {
  if (cfg.iterations < 1) throw ConfigError("spsa: iterations must be at least 1");
  if (!(cfg.a > 0.0 && cfg.c > 0.0 && cfg.alpha > 0.0 && cfg.gamma > 0.0)) {
    throw ConfigError("spsa: gains must be positive");
  }
  const double big_a = cfg.A < 0.0 ? static_cast<double>(cfg.iterations) / 10.0 : cfg.A;
  const CounterRng root(seed);
  const std::size_t n = theta0.size();
  const bool concurrent = cfg.parallel && worker_count() > 1;

  SpsaResult out;
  out.records.reserve(cfg.iterations);
  std::vector<double> theta = std::move(theta0);
  std::vector<double> best_theta = theta;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> plus(n);
  std::vector<double> minus(n);
  std::vector<int> delta(n);

  for (std::size_t k = 0; k < cfg.iterations; ++k) {
    const double kk = static_cast<double>(k);
    const double ak = cfg.a / std::pow(big_a + kk + 1.0, cfg.alpha);
    const double ck = cfg.c / std::pow(kk + 1.0, cfg.gamma);
    CounterRng perturb = root.split(3 * k);
    for (std::size_t i = 0; i < n; ++i) {
      delta[i] = perturb.rademacher();
      plus[i] = theta[i] + ck * delta[i];
      minus[i] = theta[i] - ck * delta[i];
    }
    double f[2] = {0.0, 0.0};
    const auto eval = [&](std::size_t side) {
      CounterRng rng = root.split(3 * k + 1 + side);
      f[side] = objective(side == 0 ? plus : minus, rng);
    };
    parallel_for(2, concurrent ? 2 : 1, eval);

    const double estimate = 0.5 * (f[0] + f[1]);
    if (estimate < best) {
      best = estimate;
      best_theta = theta;
    }
    out.records.push_back({k, estimate, best, hash_params(theta)});

    const double g = (f[0] - f[1]) / (2.0 * ck);
    for (std::size_t i = 0; i < n; ++i) theta[i] -= ak * g * delta[i];
  }

  out.final_params = theta;
  if (exact) {
    out.final_value = exact(theta);
    const double best_exact = exact(best_theta);
    if (out.final_value <= best_exact) {
      out.best_params = theta;
      out.best_value = out.final_value;
    } else {
      out.best_params = best_theta;
      out.best_value = best_exact;
    }
  } else {
    out.final_value = out.records.back().value;
    out.best_params = best_theta;
    out.best_value = best;
  }
  return out;
}

}  // namespace steerfid
