#include <doctest.h>

#include <functional>

#include "cpa/errors.hpp"
#include "cpa/oracle.hpp"
#include "cpa/sbp.hpp"
#include "support.hpp"

using namespace cpa;
using namespace testing_support;

namespace {

DiscretizedItem random_item(Rng& rng, const SizeGrid& g, const std::string& id) {
  Distribution d = random_grid_dist(rng, g, 2, 0, g.capacity_index() + 1, 12);
  std::vector<Rational> eff;
  for (const Rational& m : d.mass()) eff.push_back(m * static_cast<long long>(1 + uniform_index(rng, 4)));
  return make_grid_item(id, d, eff);
}

struct Built {
  Rational value;
  PolicyTree tree;
};

// Best decision tree by exhaustive search without memoization; the tree is
// materialized so its value can be re-evaluated independently.
int build(const std::vector<DiscretizedItem>& items, std::vector<bool>& used, std::size_t room, PolicyTree& t,
          Rational& value) {
  value = 0;
  int best_node = -1;
  for (std::size_t b = 0; b < items.size(); ++b) {
    if (used[b]) continue;
    used[b] = true;
    PolicyTree sub = t;
    const int node = static_cast<int>(sub.nodes.size());
    sub.nodes.push_back(PolicyNode{b, {}});
    Rational v = 0;
    auto m = items[b].size_dist.mass();
    for (std::size_t k = 0; k < m.size() && k <= room; ++k) {
      if (m[k] == 0 && items[b].profit_at(k) == 0) continue;
      v += items[b].profit_at(k);
      if (m[k] == 0) continue;
      Rational child = 0;
      const int c = build(items, used, room - k, sub, child);
      sub.nodes[static_cast<std::size_t>(node)].children[k] = c;
      v += m[k] * child;
    }
    used[b] = false;
    if (v > value) {
      value = v;
      t = std::move(sub);
      best_node = node;
    }
  }
  return best_node;
}

// Minimum parts over all set partitions.
std::size_t partition_min(const std::vector<RawItem>& items, const Rational& cap, const Rational& p) {
  const std::size_t n = items.size();
  std::vector<std::size_t> label(n, 0);
  std::size_t best = n + 1;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t parts) {
    if (parts >= best) return;
    if (i == n) {
      for (std::size_t b = 0; b < parts; ++b) {
        std::vector<std::size_t> bin;
        for (std::size_t j = 0; j < n; ++j) {
          if (label[j] == b) bin.push_back(j);
        }
        if (exact_overflow(items, bin, cap) > p) return;
      }
      best = parts;
      return;
    }
    for (std::size_t b = 0; b <= parts; ++b) {
      label[i] = b;
      rec(i + 1, std::max(parts, b + 1));
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("expected utility oracle") {
  SizeGrid g = unit_grid(8);
  EumInstance inst;
  inst.items = {make_grid_item("a", dist(g, {{0, R(1, 2)}, {6, R(1, 2)}})),
                make_grid_item("b", Distribution::point_mass(g, 3))};
  inst.utility = UtilityFunction::threshold_surrogate(R(1, 4));
  inst.structure = FeasibilityStructure::dag(3, 0, 2, {{0, 1, 0}});
  CHECK_THROWS_AS(brute_force_eum(inst), InfeasibleError);
  inst.structure = FeasibilityStructure::dag(3, 0, 2, {{0, 1, 0}, {1, 2, 1}});
  EumOracleResult one = brute_force_eum(inst);
  CHECK(one.best == std::vector<std::size_t>{0, 1});
  CHECK(one.feasible_sets == 1);

  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    EumInstance ten;
    for (int i = 0; i < 10; ++i) {
      ten.items.push_back(make_grid_item("x" + std::to_string(i), random_grid_dist(rng, g, 2, 0, 6, 16)));
    }
    ten.utility = UtilityFunction::threshold_surrogate(R(1, 4));
    ten.structure = FeasibilityStructure::cardinality(3);
    EumOracleResult fwd = brute_force_eum(ten);
    EumOracleResult rev = brute_force_eum(ten, {}, OracleLaw::Discretized, true);
    CHECK(fwd.feasible_sets == 120);
    CHECK(fwd.utility == rev.utility);
    CHECK(fwd.best == rev.best);
  }
  OracleBudget tiny;
  tiny.max_subsets = 4;
  EumInstance big;
  for (int i = 0; i < 4; ++i) big.items.push_back(make_grid_item("y", Distribution::point_mass(g, 1)));
  big.utility = UtilityFunction::threshold_surrogate(R(1, 4));
  big.structure = FeasibilityStructure::cardinality(2);
  CHECK_THROWS_AS(brute_force_eum(big, tiny), ResourceLimitError);
}

TEST_CASE("adaptive oracle basics") {
  SizeGrid g = unit_grid(4);
  std::vector<DiscretizedItem> fits{make_grid_item("a", Distribution::point_mass(g, 2), {R(0), R(0), R(5)})};
  CHECK(brute_force_adaptive(fits, g.capacity(), R(0)) == 5);
  CHECK(brute_force_adaptive(fits, R(1, 4), R(0)) == 0);
  std::vector<DiscretizedItem> none;
  CHECK(brute_force_adaptive(none, g.capacity(), R(0)) == 0);
}

TEST_CASE("adaptive oracle equals exhaustive tree search") {
  Rng rng(19);
  SizeGrid g = unit_grid(4);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<DiscretizedItem> items;
    for (int i = 0; i < 4; ++i) items.push_back(random_item(rng, g, "t" + std::to_string(i)));
    PolicyTree tree;
    Rational value = 0;
    std::vector<bool> used(items.size(), false);
    tree.root = build(items, used, g.capacity_index(), tree, value);
    CHECK(brute_force_adaptive(items, g.capacity(), R(0)) == value);
    CHECK(evaluate_policy(compact_policy(tree), items, g.capacity()) == value);
  }
}

TEST_CASE("adaptive oracle monotonicity") {
  Rng rng(23);
  SizeGrid g = unit_grid(4);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<DiscretizedItem> items;
    for (int i = 0; i < 4; ++i) items.push_back(random_item(rng, g, "m" + std::to_string(i)));
    Rational prev = -1;
    for (const Rational& relax : {R(0), R(1, 4), R(1, 2), R(1)}) {
      const Rational v = brute_force_adaptive(items, g.capacity(), relax);
      CHECK(v >= prev);
      prev = v;
    }
    std::vector<DiscretizedItem> fewer(items.begin(), items.begin() + 3);
    CHECK(brute_force_adaptive(fewer, g.capacity(), R(0)) <= brute_force_adaptive(items, g.capacity(), R(0)));
    // One group holding every item allows a single insertion.
    std::vector<ItemGroup> merged{ItemGroup{"all", items}};
    Rational single = 0;
    for (const DiscretizedItem& it : items) {
      std::vector<DiscretizedItem> one{it};
      single = std::max(single, brute_force_adaptive(one, g.capacity(), R(0)));
    }
    CHECK(brute_force_adaptive(merged, g.capacity(), R(0)) == single);
  }
}

TEST_CASE("original-law oracle on grid-aligned items") {
  Rng rng(29);
  SizeGrid g = unit_grid(4);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<RawItem> raw;
    std::vector<DiscretizedItem> disc;
    for (int i = 0; i < 3; ++i) {
      auto probs = random_probs(rng, 2, 8);
      const std::size_t k0 = uniform_index(rng, 2), k1 = 2 + uniform_index(rng, 3);
      raw.push_back(RawItem{"o" + std::to_string(i),
                            {{g.size_at(k0), R(1 + static_cast<long long>(uniform_index(rng, 3))), probs[0]},
                             {g.size_at(k1), R(1 + static_cast<long long>(uniform_index(rng, 3))), probs[1]}}});
      disc.push_back(discretize_item(raw.back(), g));
    }
    CHECK(brute_force_adaptive_original(raw, g.capacity(), R(0)) == brute_force_adaptive(disc, g.capacity(), R(0)));
  }
}

TEST_CASE("bin packing oracle") {
  std::vector<RawItem> big{RawItem{"x", {{R(2), R(0), R(1)}}}};
  CHECK_FALSE(brute_force_binpacking(big, R(1), R(1, 10), R(0)).has_value());
  std::vector<RawItem> small{RawItem{"a", {{R(1, 4), R(0), R(1)}}}, RawItem{"b", {{R(1, 4), R(0), R(1)}}}};
  CHECK(brute_force_binpacking(small, R(1), R(1, 10), R(0)) == 1u);

  Rng rng(37);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<RawItem> items;
    for (int i = 0; i < 7; ++i) {
      auto probs = random_probs(rng, 2, 8);
      items.push_back(RawItem{"p" + std::to_string(i),
                              {{R(static_cast<long long>(1 + uniform_index(rng, 3)), 8), R(0), probs[0]},
                               {R(static_cast<long long>(3 + uniform_index(rng, 4)), 8), R(0), probs[1]}}});
    }
    const Rational p(1, 4);
    auto dp = brute_force_binpacking(items, R(1), p, R(0));
    REQUIRE(dp.has_value());
    CHECK(*dp == partition_min(items, R(1), p));
  }
}

}
