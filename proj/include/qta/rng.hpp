#pragma once

#include <cstdint>

namespace qta {

/// splitmix64 stream; expands token hashes into embedding coordinates.
struct SplitMix64 {
  std::uint64_t state = 0;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

/// 64-bit linear congruential generator (Knuth MMIX constants).
/// Integer-only state and transitions; the LDA sampler depends on this
/// stream being identical across runs and platforms.
struct Lcg64 {
  std::uint64_t state = 0;

  std::uint64_t next() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return state;
  }

  /// Uniform integer in [0, n). Lemire reduction, no floating point.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  /// Top 53 bits mapped to [0, 1).
  static double to_unit(std::uint64_t x) { return (x >> 11) * 0x1.0p-53; }

  double next_unit() { return to_unit(next()); }
};

}  // namespace qta
