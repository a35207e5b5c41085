#pragma once

// Seeded randomness helpers. mt19937_64 output is pinned by the standard, but
// the std:: distributions and std::shuffle are not, so every draw we depend on
// for reproducibility is spelled out here.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

namespace farmsift::rng {

using Engine = std::mt19937_64;

// FNV-1a, 64 bit. Stable across platforms, unlike std::hash.
constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Independent stream seed for a named pipeline stage.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage) {
  return (seed + 0x9E3779B97F4A7C15ull) ^ fnv1a(stage);
}

// Uniform in [0, 1), 53 mantissa bits.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& eng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(eng);
}

// Uniform in [0, n). Rejection sampling keeps it unbiased.
inline std::uint64_t below(Engine& eng, std::uint64_t n) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % n;
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return x % n;
}

// Box-Muller without the usual cached second value; one draw, fixed cost.
inline double normal(Engine& eng) {
  const double u1 = 1.0 - uniform01(eng);
  const double u2 = uniform01(eng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Knuth's product method; fine for the small lambdas we use.
inline int poisson(Engine& eng, double lambda) {
  if (lambda <= 0.0) return 0;
  const double limit = std::exp(-lambda);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform01(eng);
  } while (p > limit);
  return k - 1;
}

// Fisher-Yates.
template <typename T>
void shuffle(std::vector<T>& v, Engine& eng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[below(eng, i)]);
  }
}

}  // namespace farmsift::rng
