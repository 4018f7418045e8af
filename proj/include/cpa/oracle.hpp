#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cpa/block.hpp"
#include "cpa/eum.hpp"

namespace cpa {

struct OracleBudget {
  std::size_t max_subsets = 1u << 22;
  std::size_t max_states = 20000000;
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 1;
};

enum class OracleLaw { Discretized, Original };

struct EumOracleResult {
  std::vector<std::size_t> best;
  Rational utility = 0;
  std::size_t feasible_sets = 0;
};

// Exhaustive maximizer over the feasible family; ties go to the
// lexicographically smallest index vector. Throws InfeasibleError on an empty
// family and ResourceLimitError beyond max_subsets.
EumOracleResult brute_force_eum(const EumInstance& instance, const OracleBudget& budget = {},
                                OracleLaw law = OracleLaw::Discretized, bool reverse = false);

// Optimal adaptive value with at most one member per group, capacity
// (1 + relax) C on the discretized grid.
Rational brute_force_adaptive(std::span<const ItemGroup> groups, const Rational& capacity, const Rational& relax,
                              const OracleBudget& budget = {});
Rational brute_force_adaptive(std::span<const DiscretizedItem> items, const Rational& capacity, const Rational& relax,
                              const OracleBudget& budget = {});

// Same on the original laws: a realized size counts when the running total
// stays within (1 + relax) C.
Rational brute_force_adaptive_original(std::span<const RawItem> items, const Rational& capacity,
                                       const Rational& relax, const OracleBudget& budget = {});

// Minimum number of bins with exact Pr[X(bin) >= (1 + cap_relax) C] <= p for
// every bin; nullopt when some item alone violates the bound.
std::optional<std::size_t> brute_force_binpacking(std::span<const RawItem> items, const Rational& capacity,
                                                  const Rational& p, const Rational& cap_relax,
                                                  const OracleBudget& budget = {});

// Exact optimum of the online selection problem on the discretized laws:
// every subset of realizations is a candidate acceptance set. With
// fixed_order the items are offered in input order.
Rational brute_force_bosp(std::span<const RawItem> items, const SizeGrid& grid, bool fixed_order = false,
                          const OracleBudget& budget = {});

// Value iteration for the unlimited-copy problem, iterated until the
// largest change is below tol.
std::vector<double> sku_value_iteration(std::span<const DiscretizedItem> items, const Rational& capacity,
                                        double tol = 1e-13, std::size_t max_iter = 1000000);

}  // namespace cpa
