#pragma once

#include <map>
#include <string>
#include <vector>

#include "cpa/discretize.hpp"
#include "cpa/random.hpp"

namespace testing_support {

using cpa::Rational;

inline Rational Q(const char* text) { return cpa::parse_rational(text); }
inline Rational R(long long num, long long den = 1) { return Rational(num, den); }

inline cpa::SizeGrid unit_grid(long long steps_per_unit = 16, Rational capacity = Rational(1)) {
  return cpa::SizeGrid(Rational(1, steps_per_unit), Rational(1, steps_per_unit), capacity);
}

inline cpa::Distribution dist(const cpa::SizeGrid& g, std::map<std::size_t, Rational> mass) {
  std::size_t top = mass.empty() ? 0 : mass.rbegin()->first;
  std::vector<Rational> v(top + 1, Rational(0));
  for (const auto& [k, p] : mass) v[k] = p;
  return cpa::Distribution(g, std::move(v));
}

// Random probability vector of `parts` positive multiples of 1/den.
inline std::vector<Rational> random_probs(cpa::Rng& rng, std::size_t parts, long long den) {
  std::vector<long long> cuts;
  while (cuts.size() + 1 < parts) {
    long long c = 1 + static_cast<long long>(cpa::uniform_index(rng, static_cast<std::uint64_t>(den - 1)));
    bool dup = false;
    for (long long x : cuts) dup = dup || x == c;
    if (!dup) cuts.push_back(c);
  }
  cuts.push_back(0);
  cuts.push_back(den);
  std::sort(cuts.begin(), cuts.end());
  std::vector<Rational> out;
  for (std::size_t i = 1; i < cuts.size(); ++i) out.push_back(Rational(cuts[i] - cuts[i - 1], den));
  return out;
}

// Distribution over distinct random grid indices in [lo, hi].
inline cpa::Distribution random_grid_dist(cpa::Rng& rng, const cpa::SizeGrid& g, std::size_t support,
                                          std::size_t lo, std::size_t hi, long long den) {
  std::map<std::size_t, Rational> mass;
  auto probs = random_probs(rng, support, den);
  std::size_t placed = 0;
  while (placed < support) {
    std::size_t k = lo + static_cast<std::size_t>(cpa::uniform_index(rng, hi - lo + 1));
    if (mass.count(k)) continue;
    mass[k] = probs[placed++];
  }
  return dist(g, mass);
}

// Brute-force sum law by enumerating every joint outcome.
inline std::map<std::size_t, Rational> enumerate_sum(const std::vector<cpa::Distribution>& ds) {
  std::map<std::size_t, Rational> acc{{0, Rational(1)}};
  for (const auto& d : ds) {
    std::map<std::size_t, Rational> next;
    for (const auto& [s, p] : acc) {
      auto m = d.mass();
      for (std::size_t k = 0; k < m.size(); ++k) {
        if (m[k] != 0) next[s + k] += p * m[k];
      }
    }
    acc = std::move(next);
  }
  return acc;
}

}  // namespace testing_support
