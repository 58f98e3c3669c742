#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace proxkit {

/// Deterministic 64-bit generator (SplitMix64). Every seeded code path in the
/// toolkit goes through this class: the standard <random> distributions are
/// implementation-defined, which would break the bit-reproducibility contract.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Unbiased integer in [0, bound). bound must be > 0.
  uint64_t below(uint64_t bound) {
    // rejection sampling on the top of the range
    const uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % bound + 1) % bound;
    uint64_t v;
    do {
      v = next_u64();
    } while (v > limit);
    return v % bound;
  }

  /// Uniform double in [0, 1) with 53 bits of randomness.
  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  /// Standard normal via Box-Muller (pair cached).
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = unit();
    const double u2 = unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// k distinct indices from [0, n), in ascending order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace proxkit
