#pragma once

#include <map>
#include <utility>

#include "cpa/rational.hpp"

namespace cpa {

// Exact law of a nonnegative size with arbitrary rational support. Mass of
// sums beyond `limit` (when set) is kept only in aggregate.
struct SparseLaw {
  std::map<Rational, Rational> atoms;
  Rational beyond = 0;

  static SparseLaw zero() {
    SparseLaw law;
    law.atoms.emplace(Rational(0), Rational(1));
    return law;
  }

  Rational prob_at_most(const Rational& x) const {
    Rational acc = 0;
    for (const auto& [s, p] : atoms) {
      if (s > x) break;
      acc += p;
    }
    return acc;
  }

  // Pr[X >= x], counting the aggregated mass beyond the limit.
  Rational prob_at_least(const Rational& x) const {
    Rational acc = beyond;
    for (auto it = atoms.lower_bound(x); it != atoms.end(); ++it) acc += it->second;
    return acc;
  }
};

// Law of A + B for independent A, B. Sums strictly greater than limit are
// moved to `beyond`; the caller must pick limit so that those sums are not
// distinguished afterwards.
inline SparseLaw convolve(const SparseLaw& a, const SparseLaw& b, const Rational& limit) {
  SparseLaw out;
  Rational total_a = a.beyond, total_b = b.beyond;
  for (const auto& [s, p] : a.atoms) total_a += p;
  for (const auto& [s, p] : b.atoms) total_b += p;
  out.beyond = a.beyond * total_b + b.beyond * (total_a - a.beyond);
  for (const auto& [sa, pa] : a.atoms) {
    for (const auto& [sb, pb] : b.atoms) {
      Rational s = sa + sb;
      if (s > limit) {
        out.beyond += pa * pb;
      } else {
        out.atoms[s] += pa * pb;
      }
    }
  }
  return out;
}

}  // namespace cpa
