#pragma once

#include <cstdint>

namespace llamafur::rng {

// Counter-based deterministic randomness: every draw is a pure function of
// (seed, stream, key, counter), so generation can be sharded or replayed
// without carrying generator state around. splitmix64 finalizer.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stream tags keep independent uses of the same seed decorrelated.
enum Stream : std::uint64_t {
  kNegativeSample = 1,
  kFoldAssign = 2,
  kSynthCategories = 3,
  kSynthFlip = 4,
  kSynthPlanted = 5,
  kRecoverySample = 6,
  kNullRanking = 7,
};

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                         std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  return splitmix64(h ^ c);
}

// Unbiased enough for sampling purposes: maps a 64-bit draw onto [0, n).
inline std::uint64_t bounded(std::uint64_t x, std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(x) * n) >> 64);
}

// [0, 1) with 53 random bits.
inline double unit_real(std::uint64_t x) { return (x >> 11) * 0x1.0p-53; }

}  // namespace llamafur::rng
