#include "cpa/grid.hpp"

#include <stdexcept>

namespace cpa {

namespace {
std::size_t exact_multiple(const Rational& x, const Rational& step, const char* what) {
  Rational q = x / step;
  if (boost::multiprecision::denominator(q) != 1) {
    throw std::invalid_argument(std::string(what) + " must be an integer multiple of the grid step");
  }
  return boost::multiprecision::numerator(q).convert_to<std::size_t>();
}
}  // namespace

SizeGrid::SizeGrid(Rational step, Rational small_threshold, Rational capacity,
                   std::optional<Rational> max_size)
    : step_(std::move(step)),
      small_threshold_(std::move(small_threshold)),
      capacity_(std::move(capacity)),
      max_size_(max_size ? *max_size : Rational(2 * capacity_)) {
  if (step_ <= 0) throw std::invalid_argument("grid step must be positive");
  if (small_threshold_ < 0) throw std::invalid_argument("small threshold must be nonnegative");
  if (capacity_ <= 0) throw std::invalid_argument("capacity must be positive");
  if (max_size_ < capacity_) throw std::invalid_argument("max size must be at least the capacity");
  small_index_ = exact_multiple(small_threshold_, step_, "small threshold");
  max_index_ = exact_multiple(max_size_, step_, "max size");
}

std::size_t SizeGrid::floor_index(const Rational& x) const {
  if (x < 0) throw std::invalid_argument("negative size");
  return floor_int(x / step_).convert_to<std::size_t>();
}

std::size_t SizeGrid::ceil_index(const Rational& x) const {
  if (x < 0) throw std::invalid_argument("negative size");
  return ceil_int(x / step_).convert_to<std::size_t>();
}

std::optional<std::size_t> SizeGrid::index_of(const Rational& x) const {
  if (x < 0) return std::nullopt;
  Rational q = x / step_;
  if (boost::multiprecision::denominator(q) != 1) return std::nullopt;
  return boost::multiprecision::numerator(q).convert_to<std::size_t>();
}

SizeGrid SizeGrid::with_capacity(const Rational& capacity) const {
  Rational max_size = max_size_ < capacity ? capacity : max_size_;
  return SizeGrid(step_, small_threshold_, capacity, max_size);
}

}  // namespace cpa
