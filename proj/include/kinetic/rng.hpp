#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

#include "kinetic/errors.hpp"

namespace kinetic {

namespace detail {

// murmur3 fmix64
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 33;
  z *= 0xff51afd7ed558ccdULL;
  z ^= z >> 33;
  z *= 0xc4ceb9fe1a85ec53ULL;
  z ^= z >> 33;
  return z;
}

}  // namespace detail

// Deterministic stream of draws keyed by (seed, stream ids).  Substreams are
// derived by hashing, never by splitting state, so any (chain, step, particle)
// combination maps to the same draws regardless of thread count or call order.
// The engine is splitmix64.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : state_(key) {}

  static RngStream derive(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> ids) {
    std::uint64_t h = detail::mix64(seed ^ 0x9e3779b97f4a7c15ULL);
    for (std::uint64_t id : ids) {
      h = detail::mix64(h ^ detail::mix64(id + 0x9e3779b97f4a7c15ULL));
    }
    return RngStream(h);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0,1); never returns 0, safe under log().
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // One Box-Muller draw; consumes exactly two uniforms.
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double exponential() { return -std::log(uniform()); }

  // Uniform over {0, ..., n-1} by rejection on the top bits.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw ContractViolation("uniform_index: n must be positive");
    std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Exact Poisson draw by Knuth multiplication; chunked so e^{-mean} never
  // underflows.  Cost is O(mean) uniforms, fine for the rates met here.
  std::uint64_t poisson(double mean) {
    if (mean < 0.0 || !std::isfinite(mean))
      throw ContractViolation("poisson: mean must be finite and >= 0");
    std::uint64_t total = 0;
    while (mean > 500.0) {
      total += poisson_chunk(500.0);
      mean -= 500.0;
    }
    return total + poisson_chunk(mean);
  }

 private:
  std::uint64_t poisson_chunk(double mean) {
    if (mean == 0.0) return 0;
    double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  std::uint64_t state_;
};

}  // namespace kinetic
