#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpa/discretize.hpp"
#include "cpa/policy.hpp"
#include "cpa/signature.hpp"

namespace cpa {

// A block inserts all of its items in order; an item's profit counts when the
// running discretized total still fits. Afterwards the policy continues at
// children[T], T being the block's realized total size index.
struct Block {
  std::vector<std::size_t> items;
  std::map<std::size_t, int> children;
};

struct BlockTree {
  std::vector<Block> blocks;
  int root = -1;

  std::size_t depth() const;
  std::size_t max_branching() const;
};

Rational evaluate_block_tree(const BlockTree& tree, std::span<const DiscretizedItem> items, const Rational& capacity);
double evaluate_block_tree_real(const BlockTree& tree, std::span<const DiscretizedItem> items,
                                const Rational& capacity);

// Mean collected profit over simulated runs with a 95% normal interval.
McEstimate mc_block_value(const BlockTree& tree, std::span<const DiscretizedItem> items, const Rational& capacity,
                          std::size_t samples, Rng& rng);

struct BlockCaps {
  std::size_t max_depth = 3;
  std::size_t max_branching = 4;
  // Expected-size cap for blocks with two or more items.
  Rational mass_cap = 1000;
};

// Throws ContractViolation on structural errors, repeated items or groups on
// a root-leaf path, or a violated cap.
void validate_block_tree(const BlockTree& tree, std::span<const DiscretizedItem> items,
                         std::span<const std::size_t> group_of, const std::optional<BlockCaps>& caps = std::nullopt);

struct SegmentCaps {
  Rational mass;
  // Segments keep |P(u_s) - P(w_s)| <= value_gap * opt_estimate.
  Rational value_gap;
  // Nodes past this cumulative expected size on their path are cut.
  std::optional<Rational> path_budget;
};

BlockTree segment_partition(const PolicyTree& tree, std::span<const DiscretizedItem> items, const Rational& capacity,
                            const Rational& opt_estimate, const SegmentCaps& caps);

// Alternative items of which a policy may use at most one per realization path.
struct ItemGroup {
  std::string id;
  std::vector<DiscretizedItem> members;
};

// Block slots identified by their size-index path from the root; prefix
// closed and sorted, slots[0] is the root.
struct Topology {
  std::vector<std::vector<std::size_t>> slots;

  int parent(std::size_t slot) const;
};

struct TopologyCaps {
  std::size_t max_blocks = 3;
  std::size_t max_depth = 3;
  std::size_t max_branches = 4;
};

std::vector<Topology> enumerate_topologies(std::size_t cap_index, const TopologyCaps& caps);

enum class BlockOrder { Density, Index };

struct SkParams {
  // Profit unit q_p * opt_estimate and probability unit q_pi.
  Rational profit_granularity = Rational(1, 64);
  Rational prob_granularity = Rational(1, 64);
  TopologyCaps topology;
  Rational block_mass_cap = 1000;
  std::size_t max_states = 2000000;
  BlockOrder order = BlockOrder::Density;
  // Group i may only go to slots without a nonempty strict descendant.
  bool fixed_order = false;
  std::optional<Rational> opt_estimate;
};

struct SkResult {
  BlockTree tree;
  Rational value = 0;
  Rational opt_estimate = 0;
  // Flattened members; the tree indexes this pool.
  std::vector<DiscretizedItem> pool;
  std::vector<std::size_t> group_of;
  std::size_t topologies = 0;
  std::size_t states = 0;
};

struct FlatGroups {
  std::vector<DiscretizedItem> pool;
  std::vector<std::size_t> group_of;
  std::vector<std::vector<std::size_t>> members;
};
FlatGroups flatten_groups(std::span<const ItemGroup> groups);

// Constant-factor estimate: the larger of a density-greedy chain policy and
// the best single member.
Rational greedy_opt_estimate(std::span<const ItemGroup> groups, const Rational& capacity);

// Signature DP over groups for one topology.
SkResult block_dp(std::span<const ItemGroup> groups, const Topology& topology, const Rational& capacity,
                  const SkParams& params, const Rational& opt_estimate);

SkResult solve_gensk(std::span<const ItemGroup> groups, const Rational& capacity, const SkParams& params);
SkResult solve_sk(std::span<const DiscretizedItem> items, const Rational& capacity, const SkParams& params);

// Members: t = infinity first, then each positive support point t in
// increasing order (size min(X, t), profit dropped for X >= t); identical
// laws are merged.
std::vector<RawItem> cancelation_laws(const RawItem& item);
ItemGroup expand_cancelations(const RawItem& item, const SizeGrid& grid);

// Given keys that are constant on contiguous runs of thresholds 0..count-1,
// returns the first index of every run using binary search.
std::vector<std::size_t> signature_change_points(std::size_t count,
                                                 const std::function<std::vector<std::int64_t>(std::size_t)>& key_at);

}  // namespace cpa
