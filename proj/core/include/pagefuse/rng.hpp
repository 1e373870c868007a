#pragma once

#include <cmath>
#include <cstdint>

namespace pagefuse {

/// Deterministic splitmix64-based generator. Distributions are implemented
/// here rather than via <random> so streams are identical across platforms
/// and standard-library versions.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return (next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  uint64_t below(uint64_t n) { return n == 0 ? 0 : next() % n; }

  /// Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Derived stream, e.g. per-page seeds from a corpus seed.
  static uint64_t mix(uint64_t seed, uint64_t index) {
    Rng r(seed ^ (0x6a09e667f3bcc909ull + index * 0x9e3779b97f4a7c15ull));
    return r.next();
  }

 private:
  uint64_t state_;
};

}  // namespace pagefuse
