#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace loadshape::rng {

/// splitmix64 step; used to derive independent sub-streams from one seed so
/// that per-interval generation stays reproducible regardless of evaluation
/// order.
inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 engine(std::uint64_t seed) { return std::mt19937_64(splitmix64(seed)); }

inline std::mt19937_64 engine(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ stream));
}

/// Uniform in [0,1) built directly from the top 53 bits; identical output on
/// every platform, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& g) { return double(g() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

/// Uniform integer in [0, n); n must be > 0. Rejection-free modulo is fine
/// here: n is tiny compared to 2^64 so the bias is far below any tolerance
/// used in this project.
inline std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t n) { return g() % n; }

/// Poisson sampling via the multiplicative method, chunked so that large
/// means do not underflow. O(lambda) draws, which is proportional to the
/// number of events generated anyway.
inline std::int64_t poisson(std::mt19937_64& g, double lambda) {
  if (lambda <= 0.0) return 0;
  std::int64_t total = 0;
  while (lambda > 500.0) {
    double chunk = 500.0;
    double limit = std::exp(-chunk);
    std::int64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform01(g);
    } while (p > limit);
    total += k - 1;
    lambda -= chunk;
  }
  double limit = std::exp(-lambda);
  std::int64_t k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform01(g);
  } while (p > limit);
  return total + k - 1;
}

/// Box-Muller; one value per call, the pair's twin is discarded for
/// simplicity.
inline double gaussian(std::mt19937_64& g, double mean = 0.0, double stddev = 1.0) {
  double u1 = 0.0;
  do {
    u1 = uniform01(g);
  } while (u1 <= 0.0);
  double u2 = uniform01(g);
  double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  return mean + stddev * z;
}

}  // namespace loadshape::rng
