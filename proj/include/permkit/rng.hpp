#pragma once

// Portable deterministic randomness. std::mt19937_64 has a standard-mandated
// output sequence, but the std distributions do not, so every distribution
// used for fixtures is implemented here with a fixed algorithm.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace permkit {

using RandomEngine = std::mt19937_64;

/// SplitMix64 step; used to derive independent sub-stream seeds.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline RandomEngine make_engine(uint64_t seed, uint64_t stream = 0) {
  return RandomEngine(splitmix64(seed + splitmix64(stream)));
}

/// Uniform integer in [0, n) via rejection sampling, n >= 1.
inline uint64_t rand_below(RandomEngine& eng, uint64_t n) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t r;
  do {
    r = eng();
  } while (r >= limit);
  return r % n;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double rand_unit(RandomEngine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller (cosine branch; two uniforms consumed).
inline double rand_normal(RandomEngine& eng) {
  double u1;
  do {
    u1 = rand_unit(eng);
  } while (u1 <= 0.0);
  const double u2 = rand_unit(eng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline double rand_normal(RandomEngine& eng, double mu, double sigma) {
  return mu + sigma * rand_normal(eng);
}

/// Gamma(alpha, 1) via Marsaglia-Tsang; alpha < 1 handled by boosting.
inline double rand_gamma(RandomEngine& eng, double alpha) {
  if (alpha < 1.0) {
    const double u = rand_unit(eng);
    return rand_gamma(eng, alpha + 1.0) * std::pow(u, 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rand_normal(eng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rand_unit(eng);
    if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

/// Fisher-Yates shuffle with rand_below.
template <typename T>
void shuffle(RandomEngine& eng, std::vector<T>& v) {
  for (size_t i = v.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rand_below(eng, i));
    std::swap(v[i - 1], v[j]);
  }
}

/// k distinct values from [0, n), uniform without replacement, in draw order.
inline std::vector<uint32_t> sample_without_replacement(RandomEngine& eng, uint32_t n, uint32_t k) {
  std::vector<uint32_t> ids(n);
  for (uint32_t i = 0; i < n; ++i) ids[i] = i;
  for (uint32_t i = 0; i < k; ++i) {
    const uint32_t j = i + static_cast<uint32_t>(rand_below(eng, n - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(k);
  return ids;
}

}  // namespace permkit
