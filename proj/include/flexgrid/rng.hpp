#pragma once

// Deterministic randomness. mt19937_64 is fully specified by the standard,
// but the std::*_distribution adaptors are not, so every draw here is built
// directly on the raw 64-bit output. Same seed, same draw sequence, on any
// conforming implementation.

#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace flexgrid {

// splitmix64 finalizer; good avalanche, used for seed derivation.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seed for a named substream of a master seed. Distinct names or indices give
// independent streams, so unrelated pieces of the pipeline can draw without
// interfering with each other's sequences.
inline std::uint64_t substream_seed(std::uint64_t master, std::string_view name,
                                    std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = mix64(master + 0x9e3779b97f4a7c15ULL);
  h = mix64(h ^ fnv1a64(name));
  h = mix64(h ^ (a + 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ (b + 0x632be59bd9b4e019ULL));
  return h;
}

// Uniform double in [0, 1) with 53 random mantissa bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Unbiased integer in [0, n); rejection keeps the mapping exact.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  assert(n > 0);
  const std::uint64_t rem = std::numeric_limits<std::uint64_t>::max() % n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - rem;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {  // inclusive
  assert(lo <= hi);
  return lo + static_cast<int>(uniform_below(
                  rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {  // Fisher-Yates
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

inline std::vector<int> random_permutation(int n, std::mt19937_64& rng) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  shuffle(p, rng);
  return p;
}

// Standard normal via Box-Muller (no cached spare; cheap enough here).
inline double normal01(std::mt19937_64& rng) {
  double u1;
  do {
    u1 = uniform01(rng);
  } while (u1 <= 0.0);
  const double u2 = uniform01(rng);
  const double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

// Poisson count via inversion on the cdf; fine for the small rates used here.
inline int poisson_draw(std::mt19937_64& rng, double rate) {
  assert(rate > 0.0);
  const double u = uniform01(rng);
  double p = std::exp(-rate);
  double cdf = p;
  int k = 0;
  while (u >= cdf && k < 10000) {
    ++k;
    p *= rate / k;
    cdf += p;
  }
  return k;
}

}  // namespace flexgrid
