#pragma once

#include <cstdint>
#include <random>

namespace plansafe {

// Deterministic helpers built directly on mt19937_64 output. The standard
// <random> distributions are not byte-portable across library
// implementations; these are, which keeps generated artifacts reproducible
// everywhere.

// Uniform integer in [0, n). Requires n > 0; modulo bias is negligible for
// n far below 2^64.
inline std::uint64_t pick(std::mt19937_64& rng, std::uint64_t n) {
  return rng() % n;
}

// Uniform value from the grid {lo, lo+step, ..., lo+k*step <= hi}.
// Quantized coordinates survive text serialization exactly.
inline double grid_value(std::mt19937_64& rng, double lo, double hi,
                         double step) {
  const auto slots =
      static_cast<std::uint64_t>((hi - lo) / step + 0.5) + 1;
  return lo + step * static_cast<double>(pick(rng, slots));
}

// Uniform double in [0, 1) with 53 random bits.
inline double unit_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// splitmix64-style mixing for deriving independent per-item seeds from a
// base seed and an index.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace plansafe
