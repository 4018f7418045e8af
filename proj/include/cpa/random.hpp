#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace cpa {

// mt19937_64 output is fixed by the standard; the helpers below avoid the
// implementation-defined standard distributions so that seeded runs are
// reproducible across standard libraries.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n), n > 0, by rejection.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Monte Carlo estimate with a 95% confidence interval [lo, hi].
struct McEstimate {
  double estimate = 0;
  double lo = 0;
  double hi = 0;
};

}  // namespace cpa
