#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cpa/discretize.hpp"
#include "cpa/random.hpp"
#include "cpa/signature.hpp"

namespace cpa {

struct SbpParams {
  // E[X~] >= heavy_cutoff is heavy.
  Rational heavy_cutoff = Rational(1, 8);
  Rational heavy_granularity = Rational(1, 1024);
  Rational light_granularity = Rational(1, 16);
  // Relaxed capacity (1 + cap_relax) C and overflow bound p + prob_relax.
  Rational cap_relax = 0;
  Rational prob_relax = 0;
  double cpd_tail_tol = 1e-12;
  std::size_t max_configurations = 100000;
  std::size_t max_candidates = 5000000;
  // Merge threshold (1 - norelax_eps) p of the no-relaxation variant.
  Rational norelax_eps = Rational(1, 20);
  std::size_t mc_samples = 20000;
};

struct HeavyTypeTable {
  // Rounded heavy laws (probabilities floored to the heavy granularity).
  std::vector<Distribution> types;
  // type_of[i] for heavy items, -1 for light items.
  std::vector<int> type_of;
  std::vector<std::size_t> counts;
};

struct HeavyClassification {
  HeavyTypeTable table;
  std::vector<std::size_t> light;
};

HeavyClassification classify_heavy(std::span<const DiscretizedItem> items, const SbpParams& params);

struct Configuration {
  std::vector<std::size_t> arrangement;
  Signature rsig;
};

// Pr[X^_H + Y^_L >= capacity] with Y^_L compound Poisson with rates rsig.
double config_overflow_prob(const Configuration& cf, const HeavyTypeTable& table, const SizeGrid& grid,
                            const Rational& capacity, double tail_tol = 1e-12);

struct Assignment {
  std::vector<std::vector<std::size_t>> bins;
  std::size_t fractional_items = 0;
  std::size_t lp_pivots = 0;
};

// Heavy items by type counts (ascending index), light items through a basic
// feasible solution of the assignment LP; fractional light items go
// round-robin in ascending index order. nullopt when the LP is infeasible or
// the arrangements do not match the heavy counts.
std::optional<Assignment> feasibility_test(std::span<const Configuration> configs,
                                           std::span<const DiscretizedItem> items, const HeavyClassification& cls,
                                           bool exact_lp = true);

struct PackingSolution {
  std::vector<std::vector<std::size_t>> bins;
  // Exact Pr[X(bin) >= relaxed capacity] on the original laws.
  std::vector<Rational> overflow;
  Rational relaxed_capacity = 0;
  std::size_t fractional_items = 0;
  std::size_t candidates_tested = 0;
  std::vector<Configuration> configs;
};

// Requires 0 < p < 1. Throws InfeasibleError when even n bins fail.
PackingSolution solve_sbp(std::span<const RawItem> items, const Rational& p, const SizeGrid& grid,
                          const SbpParams& params);

// Frequency of sum >= capacity with a 95% Wilson interval.
McEstimate estimate_overflow_mc(std::span<const RawItem> items, std::span<const std::size_t> chosen,
                                const Rational& capacity, std::size_t samples, Rng& rng);

// Exact Pr[X(S) >= capacity] on the original laws.
Rational exact_overflow(std::span<const RawItem> items, std::span<const std::size_t> chosen,
                        const Rational& capacity);

struct NorelaxSolution {
  PackingSolution packing;
  std::size_t base_bins = 0;
  std::vector<std::size_t> pieces_per_bin;
  std::size_t max_pieces = 0;
};

NorelaxSolution solve_sbp_norelax(std::span<const RawItem> items, const Rational& p, const SizeGrid& grid,
                                  const SbpParams& params, Rng& rng);

}  // namespace cpa
