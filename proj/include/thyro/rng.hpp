#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "thyro/errors.hpp"

namespace thyro {

/// Counter-based generator: every output is a pure function of
/// (seed, stream, counter), so parallel callers that own disjoint streams
/// produce identical results regardless of scheduling. The mixer is the
/// splitmix64 finalizer, which passes standard statistical batteries.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed, uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x5851f42d4c957f2dULL))) {}

  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static uint64_t hash_combine(uint64_t a, uint64_t b) { return mix(a ^ mix(b)); }

  // FNV-1a, for keying streams off case ids.
  static uint64_t hash_string(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  /// Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  uint64_t next_below(uint64_t n) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  double next_uniform(double a, double b) { return a + (b - a) * next_double(); }

  /// Standard normal via Box-Muller (cosine branch; two draws per call).
  double next_normal() {
    double u1 = 1.0 - next_double();  // (0, 1]
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  /// Poisson draw by Knuth's product-of-uniforms method. Exact and
  /// platform-independent; requires lambda <= 500 to avoid underflow.
  int next_poisson(double lambda) {
    if (lambda < 0.0 || lambda > 500.0)
      throw InvalidRangeError("poisson: lambda must be in [0, 500]");
    if (lambda == 0.0) return 0;
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= next_double();
    } while (p > limit);
    return k - 1;
  }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace thyro
