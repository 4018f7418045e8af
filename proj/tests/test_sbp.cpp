#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cpa/lp.hpp"
#include "cpa/sbp.hpp"
#include "support.hpp"

using namespace cpa;
using namespace testing_support;

namespace {

RawItem fixed(const char* id, const Rational& size) { return RawItem{id, {{size, Rational(0), Rational(1)}}}; }

RawItem two_point(const std::string& id, const Rational& a, const Rational& b, const Rational& pa) {
  return RawItem{id, {{a, Rational(0), pa}, {b, Rational(0), 1 - pa}}};
}

// Poisson draw by inversion (small rates only).
std::size_t poisson(Rng& rng, double lambda) {
  double u = uniform01(rng);
  double p = std::exp(-lambda), c = p;
  std::size_t k = 0;
  while (u > c && k < 1000) {
    ++k;
    p *= lambda / static_cast<double>(k);
    c += p;
  }
  return k;
}

void check_partition(const std::vector<std::vector<std::size_t>>& bins, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto& b : bins) {
    for (std::size_t i : b) seen.at(i) += 1;
  }
  for (int s : seen) CHECK(s == 1);
}

}  // namespace

TEST_SUITE("sbp") {

TEST_CASE("heavy classification") {
  SizeGrid g = unit_grid(16);
  SbpParams p;
  p.heavy_cutoff = R(1, 8);
  p.heavy_granularity = R(1, 16);
  std::vector<DiscretizedItem> items{
      make_grid_item("a", dist(g, {{0, R(1, 2)}, {4, R(1, 2)}})),
      make_grid_item("b", dist(g, {{0, R(1, 2)}, {4, R(1, 2)}})),
      // Mean exactly at the cutoff.
      make_grid_item("c", dist(g, {{2, R(1)}})),
      make_grid_item("d", dist(g, {{1, R(1)}})),
      // Heavy, and rounds to a different type from a.
      make_grid_item("e", dist(g, {{0, R(31, 64)}, {4, R(33, 64)}})),
  };
  HeavyClassification cls = classify_heavy(items, p);
  CHECK(cls.light == std::vector<std::size_t>{3});
  CHECK(cls.table.type_of[0] == cls.table.type_of[1]);
  CHECK(cls.table.type_of[2] >= 0);
  CHECK(cls.table.type_of[4] >= 0);
  CHECK(cls.table.types.size() == 3);
  CHECK(cls.table.counts[static_cast<std::size_t>(cls.table.type_of[0])] == 2);
  // e rounds to {0: 7/16, 4: 1/2}.
  CHECK(cls.table.type_of[4] != cls.table.type_of[0]);
  std::vector<DiscretizedItem> pair{items[0], make_grid_item("f", dist(g, {{0, R(33, 64)}, {4, R(31, 64)}})),
                                    make_grid_item("g", dist(g, {{0, R(35, 64)}, {4, R(29, 64)}}))};
  HeavyClassification c2 = classify_heavy(pair, p);
  CHECK(c2.table.type_of[1] == c2.table.type_of[2]);
}

TEST_CASE("configuration overflow probability") {
  SizeGrid g = unit_grid(8);
  HeavyTypeTable table;
  table.types.push_back(Distribution::point_mass(g, 8));
  table.counts = {1};
  Configuration empty{{0}, Signature(R(1, 16), g.size_count())};
  CHECK(config_overflow_prob(empty, table, g, g.capacity()) == doctest::Approx(0.0));
  Configuration full{{1}, Signature(R(1, 16), g.size_count())};
  CHECK(config_overflow_prob(full, table, g, g.capacity()) == doctest::Approx(1.0));

  // Mixed: a sub-probability heavy type plus a light signature, against simulation.
  HeavyTypeTable mixed;
  mixed.types.push_back(dist(g, {{0, R(1, 4)}, {3, R(1, 2)}, {5, R(3, 16)}}));
  mixed.counts = {2};
  Configuration cf{{2}, Signature(R(1, 16), g.size_count())};
  cf.rsig.counts[1] = 3;
  cf.rsig.counts[2] = 2;
  const double exact = config_overflow_prob(cf, mixed, g, g.capacity());
  Rng rng(77);
  const std::size_t samples = 400000;
  std::size_t hits = 0;
  auto m = mixed.types[0].mass();
  for (std::size_t s = 0; s < samples; ++s) {
    std::size_t total = 0;
    bool lost = false;
    for (int r = 0; r < 2; ++r) {
      double u = uniform01(rng);
      std::size_t k = 0;
      for (; k < m.size(); ++k) {
        const double pk = to_double(m[k]);
        if (u < pk) break;
        u -= pk;
      }
      if (k == m.size()) lost = true;
      total += k;
    }
    if (lost) continue;
    total += 1 * poisson(rng, 3.0 / 16) + 2 * poisson(rng, 2.0 / 16);
    if (total >= 8) ++hits;
  }
  const double est = static_cast<double>(hits) / samples;
  const double sd = std::sqrt(exact * (1 - exact) / samples);
  CHECK(std::abs(est - exact) <= 3 * sd + 1e-9);
}

TEST_CASE("feasibility test: heavy only and integral LP") {
  SizeGrid g = unit_grid(4);
  SbpParams p;
  p.heavy_cutoff = R(1, 4);
  std::vector<DiscretizedItem> items{make_grid_item("a", Distribution::point_mass(g, 2)),
                                     make_grid_item("b", Distribution::point_mass(g, 3)),
                                     make_grid_item("c", Distribution::point_mass(g, 2))};
  HeavyClassification cls = classify_heavy(items, p);
  REQUIRE(cls.light.empty());
  const std::size_t ta = static_cast<std::size_t>(cls.table.type_of[0]);
  const std::size_t tb = static_cast<std::size_t>(cls.table.type_of[1]);
  std::vector<Configuration> configs(2, Configuration{std::vector<std::size_t>(2, 0), Signature(R(1, 16), g.size_count())});
  configs[0].arrangement[ta] = 2;
  configs[1].arrangement[tb] = 1;
  auto a = feasibility_test(configs, items, cls);
  REQUIRE(a);
  CHECK(a->bins[0] == std::vector<std::size_t>{0, 2});
  CHECK(a->bins[1] == std::vector<std::size_t>{1});
  configs[1].arrangement[tb] = 0;
  CHECK_FALSE(feasibility_test(configs, items, cls));

  // Light items that each fit only one bin give an integral solution.
  SbpParams lp;
  lp.heavy_cutoff = R(1);
  std::vector<DiscretizedItem> light{make_grid_item("x", dist(g, {{0, R(3, 4)}, {1, R(1, 4)}})),
                                     make_grid_item("y", dist(g, {{0, R(3, 4)}, {2, R(1, 4)}}))};
  HeavyClassification lc = classify_heavy(light, lp);
  std::vector<Configuration> two(2, Configuration{{}, Signature(R(1, 4), g.size_count())});
  two[0].rsig.counts[1] = 1;
  two[1].rsig.counts[2] = 1;
  auto b = feasibility_test(two, light, lc);
  REQUIRE(b);
  CHECK(b->fractional_items == 0);
  CHECK(b->bins[0] == std::vector<std::size_t>{0});
  CHECK(b->bins[1] == std::vector<std::size_t>{1});
}

TEST_CASE("basic solutions have few fractional items") {
  Rng rng(13);
  SizeGrid g(R(1, 5), R(1, 5), R(1));
  const std::size_t z = g.size_count();
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t m = 2 + uniform_index(rng, 3);
    const std::size_t n = 10 + uniform_index(rng, 20);
    std::vector<DiscretizedItem> items;
    for (std::size_t i = 0; i < n; ++i) items.push_back(make_grid_item("l", random_grid_dist(rng, g, 2, 0, 5, 64)));
    SbpParams p;
    p.heavy_cutoff = R(100);
    HeavyClassification cls = classify_heavy(items, p);
    const Rational q(1, 64);
    std::vector<std::vector<Rational>> mass(m, std::vector<Rational>(z, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = uniform_index(rng, m);
      for (std::size_t k = 0; k < z; ++k) mass[j][k] += items[i].size_dist.at(k);
    }
    std::vector<Configuration> configs;
    for (std::size_t j = 0; j < m; ++j) {
      mass[j][0] = 0;
      configs.push_back(Configuration{{}, rounded_signature_up(mass[j], q)});
    }
    auto a = feasibility_test(configs, items, cls);
    REQUIRE(a);
    CHECK(a->fractional_items <= (z - 1) * m);
    check_partition(a->bins, n);
    // Rounding guarantee: each bin exceeds its signature by at most (z - 1) pi_max per coordinate.
    Rational pi_max = 0;
    for (const auto& it : items) {
      for (std::size_t k = 1; k < z; ++k) pi_max = std::max(pi_max, it.size_dist.at(k));
    }
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 1; k < z; ++k) {
        Rational got = 0;
        for (std::size_t i : a->bins[j]) got += items[i].size_dist.at(k);
        CHECK(got <= configs[j].rsig.counts[k] * q + (z - 1) * pi_max);
      }
    }
  }
}

TEST_CASE("rational simplex finds a vertex") {
  LpProblem<Rational> lp;
  lp.num_vars = 3;
  lp.eq_rows = {{{0, R(1)}, {1, R(1)}, {2, R(1)}}};
  lp.eq_rhs = {R(1)};
  lp.le_rows = {{{0, R(2)}, {1, R(1)}}};
  lp.le_rhs = {R(1, 2)};
  auto res = find_basic_feasible(lp, 1000);
  REQUIRE(res.feasible);
  CHECK(res.x[0] + res.x[1] + res.x[2] == 1);
  CHECK(2 * res.x[0] + res.x[1] <= R(1, 2));
  std::size_t positive = 0;
  for (const Rational& v : res.x) positive += v > 0 ? 1 : 0;
  CHECK(positive <= 2);
  lp.le_rows = {{{0, R(1)}, {1, R(1)}, {2, R(1)}}};
  lp.le_rhs = {R(1, 2)};
  CHECK_FALSE(find_basic_feasible(lp, 1000).feasible);
}

TEST_CASE("solve_sbp on deterministic items") {
  SizeGrid g = unit_grid(4);
  SbpParams p;
  p.cap_relax = R(1, 10);
  std::vector<RawItem> full{fixed("a", R(1)), fixed("b", R(1)), fixed("c", R(1))};
  CHECK(solve_sbp(full, R(1, 5), g, p).bins.size() == 3);
  for (std::size_t n = 1; n <= 5; ++n) {
    std::vector<RawItem> halves;
    for (std::size_t i = 0; i < n; ++i) halves.push_back(fixed("h", R(1, 2)));
    PackingSolution s = solve_sbp(halves, R(1, 5), g, p);
    CHECK(s.bins.size() == (n + 1) / 2);
    check_partition(s.bins, n);
  }
  std::vector<RawItem> too_big{fixed("x", R(3, 2))};
  CHECK_THROWS_AS(solve_sbp(too_big, R(1, 5), g, p), InfeasibleError);
}

TEST_CASE("exact and simulated overflow") {
  std::vector<RawItem> items{fixed("a", R(3, 4)), fixed("b", R(1, 2)),
                             two_point("c", R(0), R(1, 2), R(1, 3)), two_point("d", R(1, 4), R(3, 4), R(1, 2))};
  Rng rng(3);
  std::vector<std::size_t> over{0, 1}, fit{0};
  CHECK(estimate_overflow_mc(items, over, R(1), 1000, rng).estimate == 1.0);
  CHECK(estimate_overflow_mc(items, fit, R(1), 1000, rng).estimate == 0.0);
  CHECK(exact_overflow(items, over, R(1)) == 1);
  std::vector<std::size_t> pair{2, 3};
  // Sum >= 1: (1/2, 3/4) with prob 2/3 * 1/2.
  CHECK(exact_overflow(items, pair, R(1)) == R(1, 3));
  McEstimate mc = estimate_overflow_mc(items, pair, R(1), 20000, rng);
  CHECK(mc.lo <= mc.estimate);
  CHECK(mc.hi >= mc.estimate);
  CHECK(std::abs(mc.estimate - 1.0 / 3) <= 4 * std::sqrt(2.0 / 9 / 20000));
  Rng a(5), b(5);
  CHECK(estimate_overflow_mc(items, pair, R(1), 500, a).estimate == estimate_overflow_mc(items, pair, R(1), 500, b).estimate);
}

TEST_CASE("solver never needs more bins than the strict optimum") {
  Rng rng(21);
  SizeGrid g(R(1, 8), R(1, 8), R(1));
  SbpParams p;
  p.cap_relax = R(1, 10);
  p.prob_relax = R(1, 20);
  p.heavy_cutoff = R(1, 8);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<RawItem> items;
    for (int i = 0; i < 5; ++i) {
      const std::size_t lo = uniform_index(rng, 4), hi = lo + 1 + uniform_index(rng, 4);
      items.push_back(two_point("i" + std::to_string(i), g.size_at(lo), g.size_at(hi), R(1, 2)));
    }
    const Rational prob(3, 10);
    PackingSolution s = solve_sbp(items, prob, g, p);
    check_partition(s.bins, items.size());
    for (std::size_t j = 0; j < s.bins.size(); ++j) {
      CHECK(s.overflow[j] == exact_overflow(items, s.bins[j], s.relaxed_capacity));
      CHECK(s.overflow[j] <= prob + p.prob_relax);
    }
    // Strict optimum by brute force over set partitions.
    std::size_t best = items.size();
    std::vector<std::size_t> label(items.size(), 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
      if (used >= best) return;
      if (i == items.size()) {
        for (std::size_t b = 0; b < used; ++b) {
          std::vector<std::size_t> bin;
          for (std::size_t j = 0; j < items.size(); ++j) {
            if (label[j] == b) bin.push_back(j);
          }
          if (exact_overflow(items, bin, g.capacity()) > prob) return;
        }
        best = used;
        return;
      }
      for (std::size_t b = 0; b <= used; ++b) {
        label[i] = b;
        rec(i + 1, std::max(used, b + 1));
      }
    };
    rec(0, 0);
    CHECK(s.bins.size() <= best);
  }
}

TEST_CASE("no-relaxation merge") {
  Rng rng(31);
  SizeGrid g(R(1, 8), R(1, 8), R(1));
  SbpParams p;
  p.cap_relax = R(1, 10);
  p.prob_relax = R(1, 20);
  p.mc_samples = 4000;
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<RawItem> items;
    for (int i = 0; i < 5; ++i) {
      const std::size_t lo = uniform_index(rng, 3), hi = lo + 1 + uniform_index(rng, 5);
      items.push_back(two_point("i" + std::to_string(i), g.size_at(lo), g.size_at(hi), R(1, 2)));
    }
    const Rational prob(3, 10);
    Rng mc(trial + 1);
    NorelaxSolution s = solve_sbp_norelax(items, prob, g, p, mc);
    check_partition(s.packing.bins, items.size());
    CHECK(s.max_pieces <= 3);
    CHECK(s.packing.bins.size() <= 3 * s.base_bins);
    for (const Rational& o : s.packing.overflow) CHECK(o <= prob);
  }
  // A bin whose items merge back stays whole.
  std::vector<RawItem> easy{fixed("a", R(1, 4)), fixed("b", R(1, 4))};
  Rng mc(1);
  NorelaxSolution e = solve_sbp_norelax(easy, R(1, 5), g, p, mc);
  CHECK(e.packing.bins.size() == e.base_bins);
}

}
