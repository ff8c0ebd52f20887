#pragma once

// Deterministic randomness helpers.
//
// Everything that touches run output must be reproducible bit-for-bit across
// machines, so we avoid the standard-library facilities whose output is
// implementation-defined (std::uniform_*_distribution, std::shuffle) and
// build the few primitives we need on top of std::mt19937_64, whose stream
// *is* pinned by the standard.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace speclab {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used for seed derivation and hashing small keys.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stable per-stream seed: decorrelates streams drawn from one base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 1));
}

// FNV-1a over an arbitrary byte span, folded with a seed.  Stable across
// platforms; used to key per-context permutations.
inline std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes,
                             std::uint64_t seed) {
  std::uint64_t h = 14695981039346656037ull ^ splitmix64(seed);
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

// Uniform double in [0, 1) with 53 random bits.  The obvious
// std::uniform_real_distribution is not portable; this is.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n).  Modulo bias is below 2^-50 for the n we use
// (vocabulary-sized); accepted in exchange for portability.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  return rng() % n;
}

// Fisher-Yates with the portable integer draw above.  std::shuffle is not
// reproducible across standard libraries.
template <typename T>
void portable_shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace speclab
