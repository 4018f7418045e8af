#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cpa/discretize.hpp"

namespace cpa {

// counts[k] * granularity approximates the probability mass at s_k. Index 0
// is carried for alignment with grid indices and is always zero.
struct Signature {
  Rational granularity;
  std::vector<std::int64_t> counts;

  Signature() = default;
  Signature(Rational q, std::size_t size) : granularity(std::move(q)), counts(size, 0) {}

  Signature& operator+=(const Signature& other);
  friend Signature operator+(Signature a, const Signature& b) { return a += b; }
  friend bool operator==(const Signature& a, const Signature& b) {
    return a.granularity == b.granularity && a.counts == b.counts;
  }
  bool is_zero() const;
  // Exact mass vector counts[k] * granularity.
  std::vector<Rational> masses() const;
};

// Profit part in units q_p * opt_estimate (indices 0..z-1), probability part
// in units q_pi (index 0 always zero).
struct BlockSignature {
  std::vector<std::int64_t> profit_counts;
  std::vector<std::int64_t> prob_counts;

  BlockSignature& operator+=(const BlockSignature& other);
  friend bool operator==(const BlockSignature&, const BlockSignature&) = default;
};

struct Int64VectorHash {
  std::size_t operator()(std::span<const std::int64_t> v) const noexcept;
  std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept {
    return (*this)(std::span<const std::int64_t>(v));
  }
};

// counts[k] = floor(pi~(s_k) / q) for k >= 1.
Signature item_signature(const DiscretizedItem& item, const Rational& q);
// Componentwise sum; throws std::invalid_argument on mixed granularity.
Signature set_signature(std::span<const Signature> sigs);
Signature set_signature(std::span<const DiscretizedItem> items, const Rational& q);
// counts[k] = ceil(mass[k] / q) for k >= 1.
Signature rounded_signature_up(std::span<const Rational> mass, const Rational& q);
// a_k <= (1 + slack) b_k for every k.
bool signature_leq(const Signature& a, const Signature& b, const Rational& slack);

BlockSignature item_block_signature(const DiscretizedItem& item, const Rational& q_p, const Rational& q_pi,
                                    const Rational& opt_estimate);
BlockSignature block_signature(std::span<const DiscretizedItem> items, const Rational& q_p, const Rational& q_pi,
                               const Rational& opt_estimate);

}  // namespace cpa
