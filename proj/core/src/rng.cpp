#include "steerfid/rng.hpp"

#include <cmath>
#include <numbers>

namespace steerfid {

namespace {
constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGoldenGamma;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed) : key_(splitmix64(seed ^ 0x5eedf00dULL)) {}

CounterRng::result_type CounterRng::operator()() {
  ++counter_;
  return splitmix64(key_ + kGoldenGamma * counter_);
}

CounterRng CounterRng::split(std::uint64_t stream) const {
  const std::uint64_t child = splitmix64(key_ ^ splitmix64(stream + 0x243f6a8885a308d3ULL));
  return CounterRng(child, 0, 0);
}

double CounterRng::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int CounterRng::rademacher() { return ((*this)() >> 63) != 0U ? 1 : -1; }

std::uint64_t CounterRng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  // Lemire-style rejection to avoid modulo bias.
  const std::uint64_t limit = max() - (max() % n);
  std::uint64_t r = (*this)();
  while (r >= limit) r = (*this)();
  return r % n;
}

}  // namespace steerfid
