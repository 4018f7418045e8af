#include "cpa/sku.hpp"

#include "cpa/errors.hpp"

namespace cpa {

SkuResult solve_sku(std::span<const DiscretizedItem> items, const Rational& capacity) {
  SkuResult r;
  if (capacity < 0) return r;
  if (items.empty()) {
    r.value.assign(1, Rational(0));
    r.policy.assign(1, -1);
    return r;
  }
  const std::size_t cap = items.front().grid().floor_index(capacity);
  for (const DiscretizedItem& it : items) {
    if (it.size_dist.at(0) == 1 && it.profit_at(0) > 0) {
      throw DivergenceError("item " + it.id + " never consumes capacity but has positive profit");
    }
  }
  r.value.assign(cap + 1, Rational(0));
  r.policy.assign(cap + 1, -1);
  for (std::size_t s = 0; s <= cap; ++s) {
    for (std::size_t b = 0; b < items.size(); ++b) {
      const DiscretizedItem& it = items[b];
      const Rational pi0 = it.size_dist.at(0);
      if (pi0 == 1) continue;
      Rational acc = it.profit_at(0);
      auto mass = it.size_dist.mass();
      for (std::size_t k = 1; k <= s && k < mass.size(); ++k) {
        acc += it.profit_at(k);
        if (mass[k] != 0) acc += mass[k] * r.value[s - k];
      }
      const Rational v = acc / (1 - pi0);
      if (v > r.value[s]) {
        r.value[s] = v;
        r.policy[s] = static_cast<int>(b);
      }
    }
  }
  return r;
}

}  // namespace cpa
