#pragma once

#include <span>
#include <vector>

#include "cpa/discretize.hpp"

namespace cpa {

// Unlimited copies of every item; value[s] is the optimum with s grid units
// of capacity, policy[s] the item to insert next (-1 stops).
struct SkuResult {
  std::vector<Rational> value;
  std::vector<int> policy;
};

// Throws DivergenceError when some item never consumes capacity yet has
// positive profit.
SkuResult solve_sku(std::span<const DiscretizedItem> items, const Rational& capacity);

}  // namespace cpa
