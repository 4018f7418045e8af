#include "cpa/signature.hpp"

#include <stdexcept>

namespace cpa {

namespace {
void add_counts(std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t k = 0; k < b.size(); ++k) a[k] += b[k];
}
}  // namespace

Signature& Signature::operator+=(const Signature& other) {
  if (granularity != other.granularity) throw std::invalid_argument("signatures with different granularity");
  add_counts(counts, other.counts);
  return *this;
}

bool Signature::is_zero() const {
  for (std::int64_t c : counts) {
    if (c != 0) return false;
  }
  return true;
}

std::vector<Rational> Signature::masses() const {
  std::vector<Rational> out(counts.size(), Rational(0));
  for (std::size_t k = 1; k < counts.size(); ++k) out[k] = granularity * counts[k];
  return out;
}

BlockSignature& BlockSignature::operator+=(const BlockSignature& other) {
  add_counts(profit_counts, other.profit_counts);
  add_counts(prob_counts, other.prob_counts);
  return *this;
}

std::size_t Int64VectorHash::operator()(std::span<const std::int64_t> v) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ull ^ v.size();
  for (std::int64_t x : v) {
    h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

Signature item_signature(const DiscretizedItem& item, const Rational& q) {
  if (q <= 0) throw std::invalid_argument("granularity must be positive");
  Signature sg(q, item.grid().size_count());
  auto m = item.size_dist.mass();
  for (std::size_t k = 1; k < m.size(); ++k) {
    if (m[k] != 0) sg.counts[k] = floor_units(m[k], q);
  }
  return sg;
}

Signature set_signature(std::span<const Signature> sigs) {
  if (sigs.empty()) return Signature();
  Signature out(sigs.front().granularity, 0);
  for (const Signature& s : sigs) out += s;
  return out;
}

Signature set_signature(std::span<const DiscretizedItem> items, const Rational& q) {
  std::size_t z = items.empty() ? 1 : items.front().grid().size_count();
  Signature out(q, z);
  for (const DiscretizedItem& b : items) out += item_signature(b, q);
  return out;
}

Signature rounded_signature_up(std::span<const Rational> mass, const Rational& q) {
  if (q <= 0) throw std::invalid_argument("granularity must be positive");
  Signature sg(q, mass.size());
  for (std::size_t k = 1; k < mass.size(); ++k) {
    if (mass[k] != 0) sg.counts[k] = ceil_units(mass[k], q);
  }
  return sg;
}

bool signature_leq(const Signature& a, const Signature& b, const Rational& slack) {
  if (a.granularity != b.granularity) throw std::invalid_argument("signatures with different granularity");
  const std::size_t n = std::max(a.counts.size(), b.counts.size());
  const Rational factor = 1 + slack;
  for (std::size_t k = 0; k < n; ++k) {
    const std::int64_t ak = k < a.counts.size() ? a.counts[k] : 0;
    const std::int64_t bk = k < b.counts.size() ? b.counts[k] : 0;
    if (ak <= bk) continue;
    if (slack == 0 || Rational(ak) > factor * bk) return false;
  }
  return true;
}

BlockSignature item_block_signature(const DiscretizedItem& item, const Rational& q_p, const Rational& q_pi,
                                    const Rational& opt_estimate) {
  if (opt_estimate <= 0) throw std::invalid_argument("opt_estimate must be positive");
  const Rational unit = q_p * opt_estimate;
  const std::size_t z = item.grid().size_count();
  BlockSignature sg{std::vector<std::int64_t>(z, 0), std::vector<std::int64_t>(z, 0)};
  auto m = item.size_dist.mass();
  for (std::size_t k = 0; k < item.eff_profit.size(); ++k) {
    if (item.eff_profit[k] != 0) sg.profit_counts[k] = floor_units(item.eff_profit[k], unit);
  }
  for (std::size_t k = 1; k < m.size(); ++k) {
    if (m[k] != 0) sg.prob_counts[k] = floor_units(m[k], q_pi);
  }
  return sg;
}

BlockSignature block_signature(std::span<const DiscretizedItem> items, const Rational& q_p, const Rational& q_pi,
                               const Rational& opt_estimate) {
  const std::size_t z = items.empty() ? 1 : items.front().grid().size_count();
  BlockSignature out{std::vector<std::int64_t>(z, 0), std::vector<std::int64_t>(z, 0)};
  for (const DiscretizedItem& b : items) out += item_block_signature(b, q_p, q_pi, opt_estimate);
  return out;
}

}  // namespace cpa
