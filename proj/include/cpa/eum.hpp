#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cpa/discretize.hpp"
#include "cpa/signature.hpp"

namespace cpa {

// Continuous piecewise-linear utility on [0, C]; zero at and beyond the
// capacity C supplied at evaluation time.
struct UtilityFunction {
  std::vector<std::pair<Rational, Rational>> breakpoints;

  // Breakpoints must be strictly increasing in x with values in [0, 1].
  void validate() const;
  Rational operator()(const Rational& x) const;
  bool is_nonincreasing() const;
  Rational lipschitz() const;

  // chi~: 1 on [0, 1], linear down to 0 at 1 + eps.
  static UtilityFunction threshold_surrogate(const Rational& eps);
  static UtilityFunction constant(const Rational& value);
};

enum class StructureKind { Cardinality, Knapsack, DagPath };

struct DagEdge {
  std::size_t from;
  std::size_t to;
  std::size_t item;
};

struct FeasibilityStructure {
  StructureKind kind = StructureKind::Cardinality;
  std::size_t k = 0;
  Rational budget = 0;
  std::vector<Rational> costs;
  std::size_t node_count = 0;
  std::size_t source = 0;
  std::size_t sink = 0;
  std::vector<DagEdge> edges;

  static FeasibilityStructure cardinality(std::size_t k);
  static FeasibilityStructure knapsack(Rational budget, std::vector<Rational> costs);
  static FeasibilityStructure dag(std::size_t nodes, std::size_t source, std::size_t sink, std::vector<DagEdge> edges);

  // Independent membership test for a sorted set of item indices.
  bool is_feasible(std::span<const std::size_t> chosen) const;
  void validate(std::size_t item_count) const;
};

struct EumParams {
  // Items with E[X~] strictly above the cutoff are heavy.
  Rational heavy_cutoff = 0;
  Rational granularity = Rational(1, 64);
  std::size_t max_heavy = 4;
  // Heavy sets need E[X~(H)] < heavy_budget when set.
  std::optional<Rational> heavy_budget;
  std::size_t max_heavy_sets = 200000;
  std::size_t max_states = 2000000;
  // Dominance slack of the monotone variant.
  Rational mono_slack = 0;
};

struct EumInstance {
  std::vector<DiscretizedItem> items;
  // Original laws in the same order; optional.
  std::vector<RawItem> raw;
  FeasibilityStructure structure;
  UtilityFunction utility;
  EumParams params;
};

struct EumSolution {
  std::vector<std::size_t> chosen;
  std::vector<std::string> ids;
  Rational utility_discretized = 0;
  std::optional<Rational> utility_original;
  std::size_t heavy_sets = 0;
  std::size_t candidates = 0;
  // (exact utility, E[X~(S)]) for every set the solver evaluated.
  std::vector<std::pair<Rational, Rational>> evaluated;
};

// E[mu(X~(S))] by exact convolution on the items' grid.
Rational expected_utility(std::span<const DiscretizedItem> items, const UtilityFunction& mu, const Rational& capacity);
Rational expected_utility(std::span<const DiscretizedItem> items, std::span<const std::size_t> chosen,
                          const UtilityFunction& mu, const Rational& capacity);
// E[mu(X(S))] on the original laws.
Rational expected_utility_original(std::span<const RawItem> items, std::span<const std::size_t> chosen,
                                   const UtilityFunction& mu, const Rational& capacity);

struct HeavyLight {
  std::vector<std::size_t> heavy;
  std::vector<std::size_t> light;
};
HeavyLight split_heavy_light(std::span<const DiscretizedItem> items, const Rational& cutoff);

std::vector<std::vector<std::size_t>> enumerate_heavy_sets(std::span<const DiscretizedItem> items,
                                                           std::span<const std::size_t> heavy,
                                                           const FeasibilityStructure& structure,
                                                           const EumParams& params);

struct SignatureWitness {
  Signature sig;
  std::vector<std::size_t> light;
};

// One witness light set per reachable signature of L with H + L feasible.
// With mono set, states dominated within (1 + slack) are pruned.
std::vector<SignatureWitness> reachable_signature_dp(std::span<const DiscretizedItem> items,
                                                     std::span<const std::size_t> light,
                                                     const FeasibilityStructure& structure,
                                                     std::span<const std::size_t> heavy_set,
                                                     const EumParams& params, bool mono = false);

EumSolution solve_eum(const EumInstance& instance);
// Requires a nonincreasing utility (ContractViolation otherwise).
EumSolution solve_eum_mono(const EumInstance& instance);

}  // namespace cpa
