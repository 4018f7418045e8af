#include "cpa/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "cpa/errors.hpp"
#include "cpa/sbp.hpp"

namespace cpa {

EumOracleResult brute_force_eum(const EumInstance& instance, const OracleBudget& budget, OracleLaw law,
                                bool reverse) {
  const std::size_t n = instance.items.size();
  if (n >= 63 || (std::size_t{1} << n) > budget.max_subsets) {
    throw ResourceLimitError("subset enumeration exceeds the oracle budget", n);
  }
  if (law == OracleLaw::Original && instance.raw.size() != n) {
    throw std::invalid_argument("original-law oracle needs the raw item laws");
  }
  const std::size_t total = std::size_t{1} << n;
  EumOracleResult res;
  bool have = false;
  std::vector<std::size_t> chosen;
  for (std::size_t step = 0; step < total; ++step) {
    const std::size_t mask = reverse ? total - 1 - step : step;
    chosen.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1u) chosen.push_back(i);
    }
    if (!instance.structure.is_feasible(chosen)) continue;
    ++res.feasible_sets;
    Rational u;
    if (n == 0) {
      u = instance.utility(Rational(0));
    } else if (law == OracleLaw::Discretized) {
      u = expected_utility(instance.items, chosen, instance.utility, instance.items.front().grid().capacity());
    } else {
      u = expected_utility_original(instance.raw, chosen, instance.utility, instance.items.front().grid().capacity());
    }
    if (!have || u > res.utility || (u == res.utility && chosen < res.best)) {
      have = true;
      res.utility = u;
      res.best = chosen;
    }
  }
  if (!have) throw InfeasibleError("empty feasible family");
  return res;
}

Rational brute_force_adaptive(std::span<const ItemGroup> groups, const Rational& capacity, const Rational& relax,
                              const OracleBudget& budget) {
  const std::size_t g = groups.size();
  const DiscretizedItem* any = nullptr;
  for (const ItemGroup& grp : groups) {
    if (!grp.members.empty()) any = &grp.members.front();
  }
  if (any == nullptr || capacity < 0) return 0;
  const std::size_t cap = any->grid().floor_index((1 + relax) * capacity);
  if (g >= 40 || (std::size_t{1} << g) > budget.max_states / (cap + 1)) {
    throw ResourceLimitError("adaptive oracle state space exceeds the budget", g);
  }
  std::vector<std::optional<Rational>> memo((std::size_t{1} << g) * (cap + 1));
  std::function<Rational(std::size_t, std::size_t)> value = [&](std::size_t used, std::size_t c) -> Rational {
    auto& slot = memo[used * (cap + 1) + c];
    if (slot) return *slot;
    Rational best = 0;
    for (std::size_t i = 0; i < g; ++i) {
      if (used >> i & 1u) continue;
      for (const DiscretizedItem& b : groups[i].members) {
        auto mass = b.size_dist.mass();
        Rational v = 0;
        for (std::size_t k = 0; k <= c && k < mass.size(); ++k) {
          v += b.profit_at(k);
          if (mass[k] != 0) v += mass[k] * value(used | (std::size_t{1} << i), c - k);
        }
        best = std::max(best, v);
      }
    }
    slot = best;
    return best;
  };
  return value(0, cap);
}

Rational brute_force_adaptive(std::span<const DiscretizedItem> items, const Rational& capacity, const Rational& relax,
                              const OracleBudget& budget) {
  std::vector<ItemGroup> groups;
  for (const DiscretizedItem& it : items) groups.push_back(ItemGroup{it.id, {it}});
  return brute_force_adaptive(groups, capacity, relax, budget);
}

Rational brute_force_adaptive_original(std::span<const RawItem> items, const Rational& capacity,
                                       const Rational& relax, const OracleBudget& budget) {
  const std::size_t n = items.size();
  if (n >= 40 || (std::size_t{1} << n) > budget.max_subsets) {
    throw ResourceLimitError("adaptive oracle state space exceeds the budget", n);
  }
  std::map<std::pair<std::size_t, Rational>, Rational> memo;
  std::function<Rational(std::size_t, const Rational&)> value = [&](std::size_t used, const Rational& room) -> Rational {
    auto key = std::make_pair(used, room);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    if (memo.size() >= budget.max_states) throw ResourceLimitError("adaptive oracle state cap exceeded", memo.size());
    Rational best = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (used >> i & 1u) continue;
      Rational v = 0;
      for (const Realization& r : items[i].law) {
        if (r.size > room) continue;
        v += r.prob * (r.profit + value(used | (std::size_t{1} << i), room - r.size));
      }
      best = std::max(best, v);
    }
    memo.emplace(key, best);
    return best;
  };
  return value(0, (1 + relax) * capacity);
}

std::optional<std::size_t> brute_force_binpacking(std::span<const RawItem> items, const Rational& capacity,
                                                  const Rational& p, const Rational& cap_relax,
                                                  const OracleBudget& budget) {
  const std::size_t n = items.size();
  if (n == 0) return 0;
  if (n >= 30 || (std::size_t{1} << n) > budget.max_subsets) {
    throw ResourceLimitError("bin packing oracle exceeds the subset budget", n);
  }
  const Rational cap = (1 + cap_relax) * capacity;
  const std::size_t total = std::size_t{1} << n;
  // Feasibility is monotone under removal, so a set is tested only when the
  // set without its highest item passed.
  std::vector<char> feasible(total, 0);
  feasible[0] = 1;
  std::vector<std::size_t> chosen;
  for (std::size_t mask = 1; mask < total; ++mask) {
    std::size_t high = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1u) high = i;
    }
    if (!feasible[mask & ~(std::size_t{1} << high)]) continue;
    chosen.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1u) chosen.push_back(i);
    }
    feasible[mask] = exact_overflow(items, chosen, cap) <= p ? 1 : 0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!feasible[std::size_t{1} << i]) return std::nullopt;
  }
  std::vector<std::size_t> best(total, n + 1);
  best[0] = 0;
  for (std::size_t mask = 1; mask < total; ++mask) {
    const std::size_t low = mask & (~mask + 1);
    const std::size_t rest = mask ^ low;
    // Sub-masks of rest, each joined with the lowest item.
    for (std::size_t sub = rest;; sub = (sub - 1) & rest) {
      const std::size_t part = sub | low;
      if (feasible[part]) best[mask] = std::min(best[mask], best[mask ^ part] + 1);
      if (sub == 0) break;
    }
  }
  return best[total - 1];
}

Rational brute_force_bosp(std::span<const RawItem> items, const SizeGrid& grid, bool fixed_order,
                          const OracleBudget& budget) {
  std::vector<ItemGroup> groups;
  for (const RawItem& it : items) {
    it.validate();
    const std::size_t m = it.law.size();
    if (m >= 20) throw ResourceLimitError("too many realizations for acceptance-set enumeration", m);
    ItemGroup g{it.id, {}};
    for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
      RawItem d{it.id + "#" + std::to_string(mask), {}};
      Rational rejected = 0;
      for (std::size_t r = 0; r < m; ++r) {
        if (mask >> r & 1u) {
          d.law.push_back(it.law[r]);
        } else {
          rejected += it.law[r].prob;
        }
      }
      if (rejected > 0) d.law.push_back({Rational(0), Rational(0), rejected});
      g.members.push_back(discretize_item(d, grid));
    }
    groups.push_back(std::move(g));
  }
  if (!fixed_order) return brute_force_adaptive(groups, grid.capacity(), Rational(0), budget);
  const std::size_t cap = grid.capacity_index();
  const std::size_t n = groups.size();
  // V[i][c]: best from item i onwards with c units left.
  std::vector<std::vector<Rational>> v(n + 1, std::vector<Rational>(cap + 1, Rational(0)));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t c = 0; c <= cap; ++c) {
      Rational best = v[i + 1][c];
      for (const DiscretizedItem& b : groups[i].members) {
        auto mass = b.size_dist.mass();
        Rational val = 0;
        for (std::size_t k = 0; k <= c && k < mass.size(); ++k) {
          val += b.profit_at(k);
          if (mass[k] != 0) val += mass[k] * v[i + 1][c - k];
        }
        best = std::max(best, val);
      }
      v[i][c] = best;
    }
  }
  return v[0][cap];
}

std::vector<double> sku_value_iteration(std::span<const DiscretizedItem> items, const Rational& capacity, double tol,
                                        std::size_t max_iter) {
  if (items.empty()) return {0.0};
  const std::size_t cap = items.front().grid().floor_index(capacity);
  std::vector<std::vector<double>> mass(items.size()), profit(items.size());
  for (std::size_t b = 0; b < items.size(); ++b) {
    auto m = items[b].size_dist.mass();
    for (std::size_t k = 0; k < m.size(); ++k) {
      mass[b].push_back(to_double(m[k]));
      profit[b].push_back(to_double(items[b].profit_at(k)));
    }
  }
  std::vector<double> v(cap + 1, 0.0), next(cap + 1, 0.0);
  for (std::size_t it = 0; it < max_iter; ++it) {
    double change = 0;
    for (std::size_t s = 0; s <= cap; ++s) {
      double best = 0;
      for (std::size_t b = 0; b < items.size(); ++b) {
        double val = 0;
        for (std::size_t k = 0; k <= s && k < mass[b].size(); ++k) val += profit[b][k] + mass[b][k] * v[s - k];
        best = std::max(best, val);
      }
      next[s] = best;
      change = std::max(change, std::abs(best - v[s]));
    }
    v.swap(next);
    if (change < tol) return v;
  }
  throw ResourceLimitError("value iteration did not converge", max_iter);
}

}  // namespace cpa
