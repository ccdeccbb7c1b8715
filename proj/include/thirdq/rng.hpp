#pragma once

#include <cstdint>

namespace thirdq {

/* SplitMix64: tiny counter-based generator with full 64-bit avalanche per
 * draw. Output sequences are reproducible across platforms and compilers,
 * which standard-library engines with distribution wrappers do not give. */
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /* uniform in [0, 1), 53-bit mantissa */
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

/* Decorrelated per-stream seed for trajectory index i under a master seed. */
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 g(seed ^ (0x9E3779B97F4A7C15ull * (index + 1)));
  g.next();
  return g.next();
}

}  // namespace thirdq
