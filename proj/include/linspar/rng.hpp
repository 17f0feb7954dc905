#pragma once

#include <cstdint>

namespace linspar {

// splitmix64 (Steele, Lea, Flood / Vigna). Fixed here as the project-wide
// reproducible generator: graph generation must yield identical output for a
// given seed from any conforming implementation, so the mix constants are
// part of the file-format contract rather than an implementation detail.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0, bound) by modulo; bound > 0
  std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

  // uniform in (0, 1]: 53 random mantissa bits, shifted into (0,1]
  double next_weight() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }
};

}  // namespace linspar
