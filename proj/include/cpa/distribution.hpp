#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cpa/errors.hpp"
#include "cpa/grid.hpp"
#include "cpa/random.hpp"
#include "cpa/rational.hpp"

namespace cpa {

// Finite distribution over the indices of a SizeGrid.
//
// mass()[k] is the probability of size k * step for k <= top_index(). The
// overflow bucket holds the probability of every size beyond top_index();
// convolutions truncated at a cap index fold the excess there. Sizes are
// nonnegative, so overflow is absorbing under convolution.
//
// P is Rational (exact, the default) or double.
template <class P>
class BasicDistribution {
 public:
  using value_type = P;

  BasicDistribution(SizeGrid grid, std::vector<P> mass, P overflow = P(0))
      : grid_(std::move(grid)), mass_(std::move(mass)), overflow_(std::move(overflow)) {
    if (mass_.empty()) mass_.push_back(P(0));
    if (mass_.size() > grid_.size_count()) {
      throw std::invalid_argument("distribution support exceeds the grid");
    }
    for (const P& m : mass_) {
      if (m < 0) throw std::invalid_argument("negative probability mass");
    }
    if (overflow_ < 0) throw std::invalid_argument("negative overflow mass");
    trim();
  }

  static BasicDistribution point_mass(const SizeGrid& grid, std::size_t k) {
    std::vector<P> mass(k + 1, P(0));
    mass[k] = P(1);
    return BasicDistribution(grid, std::move(mass));
  }

  const SizeGrid& grid() const { return grid_; }
  std::span<const P> mass() const { return mass_; }
  std::size_t top_index() const { return mass_.size() - 1; }
  P at(std::size_t k) const { return k < mass_.size() ? mass_[k] : P(0); }
  const P& overflow() const { return overflow_; }

  P total() const {
    P t = overflow_;
    for (const P& m : mass_) t += m;
    return t;
  }

  // Probability of a nonzero size (overflow counts as nonzero).
  P nonzero_mass() const { return total() - mass_[0]; }

  // Expected size over the represented support (overflow excluded).
  P mean() const {
    P acc(0);
    for (std::size_t k = 1; k < mass_.size(); ++k) acc += mass_[k] * P(k);
    return acc * step_as<P>();
  }

  friend bool operator==(const BasicDistribution& a, const BasicDistribution& b) {
    return a.grid_ == b.grid_ && a.mass_ == b.mass_ && a.overflow_ == b.overflow_;
  }

  template <class Q>
  static Q step_as_static(const SizeGrid& g) {
    if constexpr (std::is_same_v<Q, Rational>) {
      return g.step();
    } else {
      return static_cast<Q>(to_double(g.step()));
    }
  }

 private:
  template <class Q>
  Q step_as() const {
    return step_as_static<Q>(grid_);
  }

  void trim() {
    while (mass_.size() > 1 && mass_.back() == P(0)) mass_.pop_back();
  }

  SizeGrid grid_;
  std::vector<P> mass_;
  P overflow_;
};

using Distribution = BasicDistribution<Rational>;
using RealDistribution = BasicDistribution<double>;

inline RealDistribution to_real(const Distribution& d) {
  std::vector<double> mass;
  mass.reserve(d.mass().size());
  for (const Rational& m : d.mass()) mass.push_back(to_double(m));
  return RealDistribution(d.grid(), std::move(mass), to_double(d.overflow()));
}

// Distribution of the sum of independent a and b. Mass above cap_index is
// folded into the overflow bucket; total mass is preserved.
template <class P>
BasicDistribution<P> convolve(const BasicDistribution<P>& a, const BasicDistribution<P>& b,
                              std::size_t cap_index) {
  if (!(a.grid() == b.grid())) throw GridMismatchError();
  const std::size_t top = std::min(cap_index, a.top_index() + b.top_index());
  std::vector<P> out(top + 1, P(0));
  auto am = a.mass();
  auto bm = b.mass();
  for (std::size_t i = 0; i < am.size() && i <= top; ++i) {
    if (am[i] == P(0)) continue;
    const std::size_t jmax = std::min(bm.size() - 1, top - i);
    for (std::size_t j = 0; j <= jmax; ++j) {
      if (bm[j] == P(0)) continue;
      out[i + j] += am[i] * bm[j];
    }
  }
  P kept(0);
  for (const P& m : out) kept += m;
  P overflow = a.total() * b.total() - kept;
  if constexpr (!std::is_same_v<P, Rational>) {
    if (overflow < 0) overflow = 0;
  }
  return BasicDistribution<P>(a.grid(), std::move(out), std::move(overflow));
}

// Sum of absolute differences over all grid points and the overflow bucket.
// This is twice the textbook total variation distance; values lie in [0, 2].
template <class P>
P total_variation(const BasicDistribution<P>& a, const BasicDistribution<P>& b) {
  if (!(a.grid() == b.grid())) throw GridMismatchError();
  const std::size_t n = std::max(a.mass().size(), b.mass().size());
  P acc(0);
  for (std::size_t k = 0; k < n; ++k) {
    P d = a.at(k) - b.at(k);
    acc += d < 0 ? P(-d) : d;
  }
  P d = a.overflow() - b.overflow();
  acc += d < 0 ? P(-d) : d;
  return acc;
}

// True iff a is stochastically larger than b: CDF_a(k) <= CDF_b(k) + tol at
// every grid point.
template <class P>
bool stochastically_dominates(const BasicDistribution<P>& a, const BasicDistribution<P>& b,
                              const P& tol = P(0)) {
  if (!(a.grid() == b.grid())) throw GridMismatchError();
  const std::size_t n = std::max(a.mass().size(), b.mass().size());
  P ca(0), cb(0);
  for (std::size_t k = 0; k < n; ++k) {
    ca += a.at(k);
    cb += b.at(k);
    if (ca > cb + tol) return false;
  }
  return true;
}

// Pr[X <= beta].
template <class P>
P threshold_prob(const BasicDistribution<P>& d, const Rational& beta) {
  if (beta < 0) throw std::invalid_argument("threshold must be nonnegative");
  const std::size_t kmax = d.grid().floor_index(beta);
  P acc(0);
  for (std::size_t k = 0; k <= kmax && k < d.mass().size(); ++k) acc += d.mass()[k];
  return acc;
}

// Pr[X >= index k] (overflow included).
template <class P>
P upper_tail(const BasicDistribution<P>& d, std::size_t k) {
  P acc = d.overflow();
  for (std::size_t i = k; i < d.mass().size(); ++i) acc += d.mass()[i];
  return acc;
}

// Draws a grid index with probability mass()[k]; returns top_index() + 1 for
// the overflow bucket. Deterministic given the generator state.
template <class P>
std::size_t sample(const BasicDistribution<P>& d, Rng& rng) {
  const double total = to_double(d.total());
  double u = uniform01(rng) * total;
  auto m = d.mass();
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double p = to_double(m[k]);
    if (u < p) return k;
    u -= p;
  }
  if (to_double(d.overflow()) > 0) return m.size();
  // Floating-point residue: fall back to the last atom with positive mass.
  for (std::size_t k = m.size(); k-- > 0;) {
    if (m[k] > 0) return k;
  }
  return 0;
}

}  // namespace cpa
