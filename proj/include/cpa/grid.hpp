#pragma once

#include <cstddef>
#include <optional>

#include "cpa/rational.hpp"

namespace cpa {

// Uniform size grid s_k = k * step for k = 0 .. max_index().
//
// small_threshold marks the boundary of the small-size region; sizes at or
// below it are collapsed onto {0, small_threshold} by discretization.
class SizeGrid {
 public:
  SizeGrid(Rational step, Rational small_threshold, Rational capacity,
           std::optional<Rational> max_size = std::nullopt);

  const Rational& step() const { return step_; }
  const Rational& small_threshold() const { return small_threshold_; }
  const Rational& capacity() const { return capacity_; }
  const Rational& max_size() const { return max_size_; }

  std::size_t max_index() const { return max_index_; }
  // z = |S|, the number of grid sizes.
  std::size_t size_count() const { return max_index_ + 1; }
  std::size_t small_index() const { return small_index_; }
  // Largest index whose size does not exceed capacity().
  std::size_t capacity_index() const { return floor_index(capacity_); }

  Rational size_at(std::size_t k) const { return step_ * k; }
  // Largest k with k * step <= x (x >= 0).
  std::size_t floor_index(const Rational& x) const;
  // Smallest k with k * step >= x (x >= 0).
  std::size_t ceil_index(const Rational& x) const;
  // Index of an exact grid point, or nullopt.
  std::optional<std::size_t> index_of(const Rational& x) const;

  // Same grid with another capacity (step, small threshold and max size kept).
  SizeGrid with_capacity(const Rational& capacity) const;

  friend bool operator==(const SizeGrid&, const SizeGrid&) = default;

 private:
  Rational step_;
  Rational small_threshold_;
  Rational capacity_;
  Rational max_size_;
  std::size_t max_index_ = 0;
  std::size_t small_index_ = 0;
};

}  // namespace cpa
