#include "cpa/bosp.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "cpa/errors.hpp"

namespace cpa {

std::vector<Staircase> enumerate_staircases(std::size_t a, std::size_t b, std::size_t max_count) {
  std::vector<Staircase> out;
  Staircase cur;
  cur.profit_buckets = b;
  cur.lowest.assign(a, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t from) {
    if (i == a) {
      if (out.size() >= max_count) throw ResourceLimitError("staircase cap exceeded", out.size() + 1);
      out.push_back(cur);
      return;
    }
    for (std::size_t v = from; v <= b; ++v) {
      cur.lowest[i] = v;
      rec(i + 1, v);
    }
  };
  rec(0, 0);
  return out;
}

namespace {

// 0 for x <= unit, else 1 + the largest k with unit (1 + eps)^k <= x.
std::size_t geometric_bucket(const Rational& x, const Rational& unit, const Rational& ratio) {
  if (x <= unit) return 0;
  std::size_t k = 0;
  Rational t = unit;
  while (t * ratio <= x) {
    t *= ratio;
    ++k;
  }
  return k + 1;
}

}  // namespace

BucketedLaw bucket_law(const RawItem& item, const Rational& capacity, const Rational& opt, std::size_t n,
                       const Rational& eps) {
  if (eps <= 0 || n == 0) throw std::invalid_argument("bucketing needs eps > 0 and n > 0");
  const Rational ratio = 1 + eps;
  const Rational size_unit = eps * capacity / n;
  const Rational profit_unit = eps * opt / n;
  BucketedLaw b;
  for (const Realization& r : item.law) {
    const std::size_t sb = geometric_bucket(r.size, size_unit, ratio);
    const bool huge = r.profit > opt;
    const std::size_t pb = huge ? 0 : geometric_bucket(r.profit, profit_unit, ratio);
    b.size_bucket.push_back(sb);
    b.profit_bucket.push_back(pb);
    b.huge.push_back(huge);
    b.size_buckets = std::max(b.size_buckets, sb + 1);
    if (!huge) b.profit_buckets = std::max(b.profit_buckets, pb + 1);
  }
  return b;
}

namespace {

std::vector<std::size_t> ranks(const std::vector<std::size_t>& values, std::vector<std::size_t>& rank_of) {
  std::vector<std::size_t> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  rank_of.clear();
  for (std::size_t v : values) {
    rank_of.push_back(static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin()));
  }
  return sorted;
}

RawItem derived_law(const RawItem& item, const std::vector<bool>& accept, std::size_t member) {
  RawItem d{item.id + "#" + std::to_string(member), {}};
  Rational rejected = 0;
  for (std::size_t r = 0; r < item.law.size(); ++r) {
    if (accept[r]) {
      d.law.push_back(item.law[r]);
    } else {
      rejected += item.law[r].prob;
    }
  }
  if (rejected > 0) d.law.push_back({Rational(0), Rational(0), rejected});
  return d;
}

}  // namespace

std::vector<RawItem> enumerate_acceptance_sets(const RawItem& item, const BucketedLaw& law,
                                               std::span<const Rational> remaining_caps, std::size_t max_staircases) {
  std::vector<RawItem> out;
  std::set<std::vector<bool>> seen;
  auto add = [&](const std::vector<bool>& accept) {
    if (std::find(accept.begin(), accept.end(), true) == accept.end()) return;
    if (!seen.insert(accept).second) return;
    out.push_back(derived_law(item, accept, out.size()));
  };
  const std::size_t m = item.law.size();
  for (const Rational& cap : remaining_caps) {
    std::vector<std::size_t> in_range;
    std::vector<bool> forced(m, false);
    for (std::size_t r = 0; r < m; ++r) {
      if (item.law[r].size > cap) continue;
      if (law.huge[r]) {
        forced[r] = true;
      } else {
        in_range.push_back(r);
      }
    }
    std::vector<std::size_t> sb, pb, srank, prank;
    for (std::size_t r : in_range) {
      sb.push_back(law.size_bucket[r]);
      pb.push_back(law.profit_bucket[r]);
    }
    const std::size_t a = ranks(sb, srank).size();
    const std::size_t b = ranks(pb, prank).size();
    std::vector<bool> all = forced;
    for (std::size_t r : in_range) all[r] = true;
    add(all);
    for (const Staircase& st : enumerate_staircases(a, b, max_staircases)) {
      std::vector<bool> accept = forced;
      for (std::size_t j = 0; j < in_range.size(); ++j) {
        if (st.accepts(srank[j], prank[j])) accept[in_range[j]] = true;
      }
      add(accept);
    }
  }
  return out;
}

namespace {

void add_member(ItemGroup& g, DiscretizedItem d) {
  for (const DiscretizedItem& m : g.members) {
    if (m.size_dist == d.size_dist && m.eff_profit == d.eff_profit) return;
  }
  g.members.push_back(std::move(d));
}

}  // namespace

BospResult solve_bosp(std::span<const RawItem> items, const SizeGrid& grid, const BospParams& params) {
  BospResult result;
  const Rational& capacity = grid.capacity();
  const std::vector<Rational> full_cap{capacity};
  std::vector<ItemGroup> accept_all;
  for (const RawItem& it : items) {
    it.validate();
    std::vector<bool> fits(it.law.size());
    for (std::size_t r = 0; r < it.law.size(); ++r) fits[r] = it.law[r].size <= capacity;
    ItemGroup g{it.id, {}};
    if (std::find(fits.begin(), fits.end(), true) != fits.end()) {
      g.members.push_back(discretize_item(derived_law(it, fits, 0), grid));
    }
    accept_all.push_back(std::move(g));
  }
  result.opt_estimate = params.opt_estimate ? *params.opt_estimate : greedy_opt_estimate(accept_all, capacity);
  if (items.empty() || result.opt_estimate <= 0) {
    result.sk.opt_estimate = result.opt_estimate;
    return result;
  }
  const std::span<const Rational> caps =
      params.remaining_caps.empty() ? std::span<const Rational>(full_cap) : std::span<const Rational>(params.remaining_caps);
  for (const RawItem& it : items) {
    BucketedLaw law = bucket_law(it, capacity, result.opt_estimate, items.size(), params.eps);
    ItemGroup g{it.id, {}};
    for (const RawItem& d : enumerate_acceptance_sets(it, law, caps, params.max_staircases)) {
      add_member(g, discretize_item(d, grid));
    }
    result.groups.push_back(std::move(g));
  }
  SkParams sk = params.sk;
  sk.opt_estimate = result.opt_estimate;
  if (params.fixed_order) {
    sk.fixed_order = true;
    sk.order = BlockOrder::Index;
  }
  result.sk = solve_gensk(result.groups, capacity, sk);
  return result;
}

FixedProfitSolution fixed_profit_bosp(std::span<const FixedProfitItem> items, std::size_t cap_index) {
  const std::size_t n = items.size();
  if (n > 20) throw ResourceLimitError("fixed-profit oracle supports at most 20 items", n);
  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<std::optional<Rational>> memo((full + 1) * (cap_index + 1));
  FixedProfitSolution sol;
  std::function<Rational(std::size_t, std::size_t)> value = [&](std::size_t avail, std::size_t c) -> Rational {
    auto& slot = memo[avail * (cap_index + 1) + c];
    if (slot) return *slot;
    Rational best = 0;
    for (std::size_t b = 0; b < n; ++b) {
      if (!(avail >> b & 1u)) continue;
      const std::size_t rest = avail & ~(std::size_t{1} << b);
      const Rational skip = value(rest, c);
      AcceptanceRecord rec{avail, c, b, {}};
      auto mass = items[b].size.mass();
      Rational v = items[b].size.overflow() * skip;
      for (std::size_t k = 0; k < mass.size(); ++k) {
        bool take = false;
        if (k <= c) {
          const Rational in = items[b].profit + value(rest, c - k);
          take = in >= skip;
        }
        rec.accepted.push_back(take);
        if (mass[k] == 0) continue;
        v += mass[k] * (take ? items[b].profit + value(rest, c - k) : skip);
      }
      sol.decisions.push_back(std::move(rec));
      best = std::max(best, v);
    }
    slot = best;
    return best;
  };
  sol.value = value(full, cap_index);
  return sol;
}

}  // namespace cpa
