#include <doctest.h>

#include <cmath>
#include <set>

#include "cpa/bosp.hpp"
#include "cpa/errors.hpp"
#include "cpa/oracle.hpp"
#include "cpa/sku.hpp"
#include "support.hpp"

using namespace cpa;
using namespace testing_support;

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// a x b realizations, one per bucket pair, all fitting and none huge.
RawItem grid_item(std::size_t a, std::size_t b) {
  RawItem it{"g", {}};
  const Rational unit(1, 4), ratio(5, 4);
  Rational s = unit;
  for (std::size_t i = 0; i < a; ++i, s *= ratio) {
    Rational p = unit;
    for (std::size_t j = 0; j < b; ++j, p *= ratio) {
      it.law.push_back({s, p, Rational(1, static_cast<long long>(a * b))});
    }
  }
  return it;
}

RawItem random_joint(Rng& rng, const SizeGrid& g, const std::string& id, std::size_t support, bool fixed_profit) {
  RawItem it{id, {}};
  auto probs = random_probs(rng, support, 12);
  const Rational profit(static_cast<long long>(1 + uniform_index(rng, 4)));
  std::vector<std::size_t> used;
  for (std::size_t r = 0; r < support; ++r) {
    std::size_t k;
    do {
      k = 1 + uniform_index(rng, g.capacity_index() + 1);
    } while (std::find(used.begin(), used.end(), k) != used.end());
    used.push_back(k);
    const Rational p = fixed_profit ? profit : Rational(static_cast<long long>(uniform_index(rng, 5)));
    it.law.push_back({g.size_at(k), p, probs[r]});
  }
  return it;
}

FixedProfitItem as_fixed(const RawItem& it, const SizeGrid& g) {
  std::map<std::size_t, Rational> mass;
  for (const Realization& r : it.law) mass[*g.index_of(r.size)] += r.prob;
  return FixedProfitItem{it.law.front().profit, dist(g, mass)};
}

}  // namespace

TEST_SUITE("bosp") {

TEST_CASE("staircase counts") {
  CHECK(enumerate_staircases(1, 1).size() == 2);
  CHECK(enumerate_staircases(2, 2).size() == 6);
  for (std::size_t a = 0; a <= 5; ++a) {
    for (std::size_t b = 0; b <= 5; ++b) CHECK(enumerate_staircases(a, b).size() == binomial(a + b, a));
  }
  for (const Staircase& s : enumerate_staircases(3, 2)) {
    for (std::size_t i = 1; i < s.lowest.size(); ++i) CHECK(s.lowest[i - 1] <= s.lowest[i]);
  }
  CHECK_THROWS_AS(enumerate_staircases(5, 5, 10), ResourceLimitError);
}

TEST_CASE("acceptance sets on a full bucket grid") {
  for (std::size_t a = 1; a <= 3; ++a) {
    for (std::size_t b = 1; b <= 3; ++b) {
      RawItem it = grid_item(a, b);
      BucketedLaw law = bucket_law(it, R(1), R(1), 1, R(1, 4));
      std::set<std::size_t> sizes(law.size_bucket.begin(), law.size_bucket.end());
      std::set<std::size_t> profits(law.profit_bucket.begin(), law.profit_bucket.end());
      CHECK(sizes.size() == a);
      CHECK(profits.size() == b);
      std::vector<Rational> caps{R(1)};
      auto sets = enumerate_acceptance_sets(it, law, caps, 1000);
      // The empty acceptance set is dropped.
      CHECK(sets.size() + 1 == binomial(a + b, a));
      CHECK(sets.front().law.size() == it.law.size());
    }
  }
}

TEST_CASE("bucketing and forced acceptance") {
  RawItem it{"h", {{R(1, 2), R(10), R(1, 2)}, {R(3, 2), R(1), R(1, 4)}, {R(1, 64), R(1, 64), R(1, 4)}}};
  BucketedLaw law = bucket_law(it, R(1), R(2), 2, R(1, 4));
  CHECK(law.huge[0]);
  CHECK_FALSE(law.huge[1]);
  CHECK(law.size_bucket[2] == 0);
  CHECK(law.profit_bucket[2] == 0);
  std::vector<Rational> caps{R(1)};
  for (const RawItem& d : enumerate_acceptance_sets(it, law, caps, 1000)) {
    bool has_huge = false, has_oversize = false;
    for (const Realization& r : d.law) {
      has_huge = has_huge || r.profit == 10;
      has_oversize = has_oversize || r.size == R(3, 2);
    }
    CHECK(has_huge);
    CHECK_FALSE(has_oversize);
  }
}

TEST_CASE("fixed-profit acceptance is a size cutoff") {
  Rng rng(31);
  SizeGrid g = unit_grid(4);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<FixedProfitItem> items;
    for (int i = 0; i < 3; ++i) items.push_back(as_fixed(random_joint(rng, g, "f", 3, true), g));
    FixedProfitSolution sol = fixed_profit_bosp(items, g.capacity_index());
    CHECK(!sol.decisions.empty());
    for (const AcceptanceRecord& rec : sol.decisions) {
      for (std::size_t k = 1; k < rec.accepted.size(); ++k) {
        if (rec.accepted[k]) CHECK(rec.accepted[k - 1]);
      }
    }
  }
  // Staircases over one profit bucket collapse to size cutoffs.
  for (const Staircase& s : enumerate_staircases(4, 1)) {
    std::size_t accepted = 0;
    while (accepted < 4 && s.accepts(accepted, 0)) ++accepted;
    for (std::size_t i = accepted; i < 4; ++i) CHECK_FALSE(s.accepts(i, 0));
  }
}

TEST_CASE("single item accepts everything") {
  SizeGrid g = unit_grid(4);
  std::vector<RawItem> one{RawItem{"a", {{R(1, 4), R(2), R(1, 2)}, {R(3, 4), R(4), R(1, 2)}}}};
  BospResult r = solve_bosp(one, g, BospParams{});
  CHECK(r.sk.value == 3);
  CHECK(brute_force_bosp(one, g) == 3);
  std::vector<RawItem> none;
  CHECK(solve_bosp(none, g, BospParams{}).sk.value == 0);
}

TEST_CASE("two fixed-profit items match the cutoff oracle") {
  Rng rng(77);
  SizeGrid g = unit_grid(4);
  BospParams p;
  p.sk.profit_granularity = R(1, 4096);
  p.sk.prob_granularity = R(1, 4096);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<RawItem> items{random_joint(rng, g, "a", 2, true), random_joint(rng, g, "b", 2, true)};
    std::vector<FixedProfitItem> fixed{as_fixed(items[0], g), as_fixed(items[1], g)};
    const Rational oracle = fixed_profit_bosp(fixed, g.capacity_index()).value;
    CHECK(brute_force_bosp(items, g) == oracle);
    BospResult r = solve_bosp(items, g, p);
    CHECK(r.sk.value == oracle);
    validate_block_tree(r.sk.tree, r.sk.pool, r.sk.group_of);
  }
}

TEST_CASE("fixed order never beats free order") {
  Rng rng(90);
  SizeGrid g = unit_grid(4);
  BospParams p;
  p.sk.profit_granularity = R(1, 512);
  p.sk.prob_granularity = R(1, 512);
  BospParams fixed = p;
  fixed.fixed_order = true;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<RawItem> items;
    for (int i = 0; i < 3; ++i) items.push_back(random_joint(rng, g, "x" + std::to_string(i), 2, false));
    const Rational free_opt = brute_force_bosp(items, g, false);
    const Rational fixed_opt = brute_force_bosp(items, g, true);
    CHECK(fixed_opt <= free_opt);
    BospResult rf = solve_bosp(items, g, p);
    BospResult ro = solve_bosp(items, g, fixed);
    CHECK(rf.sk.value <= free_opt);
    CHECK(ro.sk.value <= fixed_opt);
    CHECK(ro.sk.value <= rf.sk.value);
    CHECK(rf.sk.value >= R(4, 5) * free_opt);
  }
}

}

TEST_SUITE("sku") {

TEST_CASE("repeated copies of a self-returning item") {
  SizeGrid g = unit_grid(4);
  std::vector<DiscretizedItem> items{make_grid_item("r", Distribution(g, {R(1, 2)}, R(1, 2)), {R(1)})};
  SkuResult r = solve_sku(items, g.capacity());
  REQUIRE(r.value.size() == 5);
  for (const Rational& v : r.value) CHECK(v == 2);
  CHECK(r.policy[0] == 0);
}

TEST_CASE("zero profits and degenerate items") {
  SizeGrid g = unit_grid(4);
  std::vector<DiscretizedItem> zero{make_grid_item("z", dist(g, {{1, R(1, 2)}, {2, R(1, 2)}}))};
  SkuResult r = solve_sku(zero, g.capacity());
  for (std::size_t s = 0; s < r.value.size(); ++s) {
    CHECK(r.value[s] == 0);
    CHECK(r.policy[s] == -1);
  }
  std::vector<DiscretizedItem> loop{make_grid_item("l", Distribution::point_mass(g, 0), {R(1)})};
  CHECK_THROWS_AS(solve_sku(loop, g.capacity()), DivergenceError);
  std::vector<DiscretizedItem> idle{make_grid_item("i", Distribution::point_mass(g, 0)),
                                    make_grid_item("d", Distribution::point_mass(g, 2), {R(0), R(0), R(3)})};
  SkuResult d = solve_sku(idle, g.capacity());
  CHECK(d.value == std::vector<Rational>{0, 0, 3, 3, 6});
}

TEST_CASE("matches value iteration and grows with capacity") {
  Rng rng(14);
  SizeGrid g = unit_grid(8);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<DiscretizedItem> items;
    for (int b = 0; b < 2; ++b) {
      Distribution d = random_grid_dist(rng, g, 3, 0, 10, 32);
      std::vector<Rational> eff;
      for (const Rational& m : d.mass()) eff.push_back(m * static_cast<long long>(uniform_index(rng, 4)));
      items.push_back(make_grid_item("s" + std::to_string(b), d, eff));
    }
    SkuResult r = solve_sku(items, g.capacity());
    auto vi = sku_value_iteration(items, g.capacity());
    REQUIRE(vi.size() == r.value.size());
    for (std::size_t s = 0; s < vi.size(); ++s) {
      CHECK(std::abs(to_double(r.value[s]) - vi[s]) <= 1e-10);
      if (s > 0) CHECK(r.value[s] >= r.value[s - 1]);
    }
  }
}

}
