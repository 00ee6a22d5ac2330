#pragma once

#include <cstdint>
#include <cmath>
#include <stdexcept>

namespace ropeid {

// Deterministic RNG used everywhere randomness is needed. All distributions
// are implemented here (not via <random> distributions, whose algorithms are
// implementation-defined) so that a seed produces the same stream on every
// platform and toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix(seed ^ 0x9e3779b97f4a7c15ull)) {
    // warm up so that low-entropy seeds (0, 1, 2, ...) diverge quickly
    next();
    next();
  }

  std::uint64_t next() {
    // xorshift64* generator, seeded through splitmix64
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545f4914f6cdd1dull;
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  std::uint64_t integer(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::integer: n must be positive");
    // rejection sampling to avoid modulo bias
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  // standard normal via Box-Muller (cosine branch only; stateless apart from
  // the generator, so forked streams stay independent)
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Independent child stream; forking by index makes parallel per-item draws
  // order-independent.
  Rng fork(std::uint64_t stream) const {
    return Rng(splitmix(state_ ^ splitmix(stream + 0x632be59bd9b4e019ull)));
  }

  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t state_;
};

}  // namespace ropeid
