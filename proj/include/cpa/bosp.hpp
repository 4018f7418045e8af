#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cpa/block.hpp"
#include "cpa/discretize.hpp"

namespace cpa {

// Acceptance region on an a x b bucket grid: in size bucket i the accepted
// profit buckets are those >= lowest[i]; lowest is nondecreasing and
// lowest[i] == b accepts nothing in that column.
struct Staircase {
  std::vector<std::size_t> lowest;
  std::size_t profit_buckets = 0;

  bool accepts(std::size_t size_bucket, std::size_t profit_bucket) const {
    return profit_bucket >= lowest[size_bucket];
  }
};

// All C(a + b, a) staircases in lexicographic order of `lowest`.
std::vector<Staircase> enumerate_staircases(std::size_t a, std::size_t b, std::size_t max_count = 1000000);

struct BospParams {
  Rational eps = Rational(1, 4);
  std::optional<Rational> opt_estimate;
  // Candidate remaining capacities; the knapsack capacity when empty.
  std::vector<Rational> remaining_caps;
  std::size_t max_staircases = 100000;
  SkParams sk;
  bool fixed_order = false;
};

// Realizations of one item mapped onto geometric buckets. Bucket 0 holds
// sizes <= eps C / n (resp. profits <= eps OPT / n); realizations with
// profit > OPT are huge and sit outside the grid.
struct BucketedLaw {
  std::vector<std::size_t> size_bucket;
  std::vector<std::size_t> profit_bucket;
  std::vector<bool> huge;
  std::size_t size_buckets = 0;
  std::size_t profit_buckets = 0;
};

BucketedLaw bucket_law(const RawItem& item, const Rational& capacity, const Rational& opt, std::size_t n,
                       const Rational& eps);

// Derived laws (X^D, P^D): accepted realizations keep their original size and
// profit, the rest collapse to (0, 0). Distinct acceptance sets only; the
// first member accepts every realization that fits the capacity.
std::vector<RawItem> enumerate_acceptance_sets(const RawItem& item, const BucketedLaw& law,
                                               std::span<const Rational> remaining_caps, std::size_t max_staircases);

struct BospResult {
  SkResult sk;
  std::vector<ItemGroup> groups;
  Rational opt_estimate = 0;
};

BospResult solve_bosp(std::span<const RawItem> items, const SizeGrid& grid, const BospParams& params);

// Exact optimum of the fixed-profit problem (free order, each item offered
// at most once) with the accepted sizes of every optimal decision.
struct FixedProfitItem {
  Rational profit;
  Distribution size;
};

struct AcceptanceRecord {
  std::size_t available = 0;
  std::size_t capacity = 0;
  std::size_t item = 0;
  // accepted[k] for every support index k of the item.
  std::vector<bool> accepted;
};

struct FixedProfitSolution {
  Rational value = 0;
  std::vector<AcceptanceRecord> decisions;
};

FixedProfitSolution fixed_profit_bosp(std::span<const FixedProfitItem> items, std::size_t cap_index);

}  // namespace cpa
