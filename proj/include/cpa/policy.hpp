#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "cpa/discretize.hpp"
#include "cpa/random.hpp"

namespace cpa {

// Inserts `item`; when its discretized size realizes to index k, continues
// at children[k]. A missing key or -1 stops the policy.
struct PolicyNode {
  std::size_t item = 0;
  std::map<std::size_t, int> children;
};

struct PolicyTree {
  std::vector<PolicyNode> nodes;
  int root = -1;

  int child(int node, std::size_t k) const;
};

// Throws ContractViolation on dangling indices, on cycles, or when an item
// (or, with group_of, a group) repeats along a root-leaf path.
void validate_policy(const PolicyTree& tree, std::span<const DiscretizedItem> items,
                     std::span<const std::size_t> group_of = {});

// P(v) = sum over k with W + k <= C of p~(k) + pi(k) P(child_k).
Rational evaluate_policy(const PolicyTree& tree, std::span<const DiscretizedItem> items, const Rational& capacity);
// Value of the subtree at `node` entered with `used` grid units consumed.
Rational evaluate_subtree(const PolicyTree& tree, int node, std::span<const DiscretizedItem> items,
                          std::size_t used, std::size_t cap_index);

// Canonical semantics on the original laws: branching follows the
// discretized index of each coupling atom, while profit is collected only
// when both the discretized total fits disc_capacity and the original total
// fits actual_capacity.
Rational evaluate_policy_original(const PolicyTree& tree, std::span<const DiscretizedItem> items,
                                  const Rational& disc_capacity, const Rational& actual_capacity);

// Replaces an ancestor subtree by a copy of a descendant subtree with larger
// value until every node's value dominates its descendants'.
PolicyTree normalize_policy(const PolicyTree& tree, std::span<const DiscretizedItem> items, const Rational& capacity);

// Drops unreachable nodes and renumbers in preorder.
PolicyTree compact_policy(const PolicyTree& tree);

enum class SimulationMode { Discretized, Original };

// Mean collected profit over simulated runs with a 95% normal interval.
McEstimate mc_policy_value(const PolicyTree& tree, std::span<const DiscretizedItem> items, const Rational& capacity,
                           std::size_t samples, Rng& rng, SimulationMode mode = SimulationMode::Discretized);

}  // namespace cpa
