#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cpa/distribution.hpp"
#include "cpa/sparse_law.hpp"

namespace cpa {

struct Realization {
  Rational size;
  Rational profit;
  Rational prob;
};

// Joint size/profit law of one item.
struct RawItem {
  std::string id;
  std::vector<Realization> law;

  // Throws std::invalid_argument unless probabilities are positive and sum
  // to 1, sizes are nonnegative and profits nonnegative.
  void validate() const;
  SparseLaw size_law() const;
  Rational expected_size() const;
  Rational expected_profit() const;
};

struct DiscretizationParams {
  SizeGrid grid;
  Rational heavy_cutoff_eum = 0;
  Rational heavy_cutoff_sbp = 0;
  Rational prob_granularity = 0;
};

// One piece of an original realization and the grid index it is sent to.
// A split small atom yields two pieces with the same original size.
struct CouplingAtom {
  Rational size;
  Rational prob;
  Rational eff_profit;
  std::size_t index;
};

struct SplitRecord {
  Rational atom_size;
  Rational to_zero;
  Rational to_small;
};

struct DiscretizedItem {
  std::string id;
  Distribution size_dist;
  // p~(s_k) indexed like size_dist.mass(); padded with zeros.
  std::vector<Rational> eff_profit;
  std::vector<CouplingAtom> coupling;
  std::optional<SplitRecord> split;

  DiscretizedItem(std::string id, Distribution size_dist, std::vector<Rational> eff_profit);

  const SizeGrid& grid() const { return size_dist.grid(); }
  Rational profit_at(std::size_t k) const { return k < eff_profit.size() ? eff_profit[k] : Rational(0); }
  Rational expected_size() const { return size_dist.mean(); }
  Rational total_profit() const;
  // Pr[X~ != 0].
  Rational nonzero_prob() const { return size_dist.nonzero_mass(); }
};

// Sum of profit * prob per distinct size.
std::map<Rational, Rational> effective_profit(const RawItem& item);

DiscretizedItem discretize_item(const RawItem& item, const SizeGrid& grid);

// Items whose sizes are already grid points, with profits given per grid index.
DiscretizedItem make_grid_item(std::string id, const Distribution& size_dist,
                               std::vector<Rational> eff_profit = {});

}  // namespace cpa
