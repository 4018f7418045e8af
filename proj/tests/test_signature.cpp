#include <doctest.h>

#include "cpa/compound_poisson.hpp"
#include "cpa/signature.hpp"
#include "support.hpp"

using namespace cpa;
using namespace testing_support;

TEST_SUITE("signature") {

TEST_CASE("item signatures floor exactly") {
  SizeGrid g = unit_grid(16);
  DiscretizedItem a = make_grid_item("a", dist(g, {{0, R(63, 100)}, {1, R(37, 100)}}));
  CHECK(item_signature(a, R(1, 10)).counts[1] == 3);
  DiscretizedItem b = make_grid_item("b", dist(g, {{0, R(7, 10)}, {1, R(3, 10)}}));
  CHECK(item_signature(b, R(1, 10)).counts[1] == 3);
  DiscretizedItem z = make_grid_item("z", Distribution::point_mass(g, 0));
  CHECK(item_signature(z, R(1, 10)).is_zero());
}

TEST_CASE("set signatures are additive") {
  SizeGrid g = unit_grid(16);
  std::vector<DiscretizedItem> none;
  CHECK(set_signature(none, R(1, 10)).is_zero());
  DiscretizedItem a = make_grid_item("a", dist(g, {{0, R(1, 2)}, {2, R(1, 4)}, {3, R(1, 4)}}));
  std::vector<DiscretizedItem> twice{a, a};
  Signature one = item_signature(a, R(1, 8));
  Signature both = set_signature(twice, R(1, 8));
  for (std::size_t k = 0; k < one.counts.size(); ++k) CHECK(both.counts[k] == 2 * one.counts[k]);

  Rng rng(9);
  std::vector<DiscretizedItem> items;
  for (int i = 0; i < 5; ++i) items.push_back(make_grid_item("r", random_grid_dist(rng, g, 3, 0, 8, 50)));
  Signature s = set_signature(items, R(1, 25));
  std::vector<std::int64_t> manual(g.size_count(), 0);
  for (const auto& it : items) {
    for (std::size_t k = 1; k < g.size_count(); ++k) manual[k] += floor_int(it.size_dist.at(k) / R(1, 25)).convert_to<std::int64_t>();
  }
  CHECK(s.counts == manual);
  Signature other(R(1, 7), g.size_count());
  CHECK_THROWS_AS(s += other, std::invalid_argument);
}

TEST_CASE("ceiling rounding") {
  std::vector<Rational> m{R(0), R(3, 10), R(31, 100), R(0)};
  Signature s = rounded_signature_up(m, R(1, 10));
  CHECK(s.counts[1] == 3);
  CHECK(s.counts[2] == 4);
  CHECK(s.counts[3] == 0);
  CHECK(rounded_signature_up(std::vector<Rational>(4, R(0)), R(1, 10)).is_zero());
}

TEST_CASE("signature_leq with slack") {
  Signature a(R(1, 100), 4), b(R(1, 100), 4);
  a.counts = {0, 10, 20, 5};
  b.counts = a.counts;
  CHECK(signature_leq(a, b, R(0)));
  a.counts[2] = 21;
  CHECK_FALSE(signature_leq(a, b, R(0)));
  Signature c(R(1, 100), 4);
  c.counts = {0, 21, 42, 0};
  b.counts = {0, 20, 40, 0};
  CHECK(signature_leq(c, b, R(1, 10)));
  CHECK_FALSE(signature_leq(c, b, R(1, 100)));
}

TEST_CASE("block signatures") {
  SizeGrid g = unit_grid(16);
  DiscretizedItem a = make_grid_item("a", dist(g, {{0, R(1, 2)}, {2, R(1, 2)}}), {R(0), R(0), R(1, 10)});
  BlockSignature s = item_block_signature(a, R(1, 4), R(1, 8), R(1));
  CHECK(s.profit_counts[2] == 0);
  CHECK(s.prob_counts[2] == 4);
  DiscretizedItem b = make_grid_item("b", dist(g, {{1, R(3, 4)}, {3, R(1, 4)}}), {R(0), R(3, 2), R(0), R(5, 4)});
  std::vector<DiscretizedItem> block{a, b, b};
  BlockSignature t = block_signature(block, R(1, 4), R(1, 8), R(2));
  // Independent floor-and-sum: profit unit 1/2, probability unit 1/8.
  CHECK(t.profit_counts[1] == 2 * 3);
  CHECK(t.profit_counts[3] == 2 * 2);
  CHECK(t.prob_counts[1] == 2 * 6);
  CHECK(t.prob_counts[3] == 2 * 2);
  CHECK(t.prob_counts[2] == 4);
  std::vector<DiscretizedItem> single{b}, doubled{b, b};
  BlockSignature s1 = block_signature(single, R(1, 4), R(1, 8), R(2));
  BlockSignature s2 = block_signature(doubled, R(1, 4), R(1, 8), R(2));
  for (std::size_t k = 0; k < s1.prob_counts.size(); ++k) {
    CHECK(s2.prob_counts[k] == 2 * s1.prob_counts[k]);
    CHECK(s2.profit_counts[k] == 2 * s1.profit_counts[k]);
  }
}

TEST_CASE("rounding error per item and per set") {
  SizeGrid g = unit_grid(16);
  Rng rng(77);
  const Rational q(1, 40);
  std::vector<DiscretizedItem> items;
  for (int i = 0; i < 8; ++i) items.push_back(make_grid_item("r", random_grid_dist(rng, g, 3, 0, 10, 97)));
  std::vector<Rational> exact(g.size_count(), Rational(0));
  for (const auto& it : items) {
    Signature s = item_signature(it, q);
    for (std::size_t k = 1; k < g.size_count(); ++k) {
      Rational err = it.size_dist.at(k) - q * s.counts[k];
      CHECK(err >= 0);
      CHECK(err < q);
      exact[k] += it.size_dist.at(k);
    }
  }
  Signature total = set_signature(items, q);
  for (std::size_t k = 1; k < g.size_count(); ++k) CHECK(exact[k] - q * total.counts[k] <= q * 8);
}

TEST_CASE("equal signatures imply bounded distance") {
  SizeGrid g = unit_grid(16);
  const Rational q(1, 64);
  Rng rng(4242);
  int pairs = 0;
  for (int trial = 0; trial < 400 && pairs < 40; ++trial) {
    // Light items with Pr[X != 0] <= 1/8 on the first three sizes.
    auto light = [&]() {
      const std::size_t k = 1 + uniform_index(rng, 2);
      const Rational pi(1 + static_cast<long long>(uniform_index(rng, 2)), 64);
      return make_grid_item("l", dist(g, {{0, 1 - pi}, {k, pi}}));
    };
    std::vector<DiscretizedItem> s1, s2;
    for (int i = 0; i < 3; ++i) s1.push_back(light());
    for (int i = 0; i < 3; ++i) s2.push_back(light());
    if (!(set_signature(s1, q) == set_signature(s2, q))) continue;
    ++pairs;
    Distribution x1 = Distribution::point_mass(g, 0), x2 = x1;
    Rational sq = 0;
    for (const auto& it : s1) {
      x1 = convolve(x1, it.size_dist, g.max_index());
      sq += it.nonzero_prob() * it.nonzero_prob();
    }
    for (const auto& it : s2) {
      x2 = convolve(x2, it.size_dist, g.max_index());
      sq += it.nonzero_prob() * it.nonzero_prob();
    }
    const Rational bound = 2 * (Rational(6) * q * (g.size_count() - 1)) + 2 * sq;
    CHECK(total_variation(x1, x2) <= bound);
  }
  CHECK(pairs > 0);
}

}
