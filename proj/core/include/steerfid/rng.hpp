#pragma once

#include <cstdint>
#include <limits>

namespace steerfid {

// Counter-based generator: the n-th output is a SplitMix64 finalization of
// (key + n * golden_gamma). Streams are derived from a parent key, so any
// (seed, stream path) pair names one reproducible sequence regardless of the
// order in which streams are consumed or the thread that consumes them.
//
// Distribution helpers are implemented here rather than through <random>
// distributions because the latter are implementation-defined, and traces
// must be reproducible across standard libraries.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Independent child stream; does not advance this generator.
  [[nodiscard]] CounterRng split(std::uint64_t stream) const;

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Standard normal via Box-Muller (no cached second variate).
  double normal();
  // +1 or -1 with equal probability.
  int rademacher();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  [[nodiscard]] std::uint64_t key() const { return key_; }
  [[nodiscard]] std::uint64_t counter() const { return counter_; }

 private:
  CounterRng(std::uint64_t key, std::uint64_t counter, int /*tag*/) : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace steerfid
