#pragma once

#include <cstddef>
#include <vector>

#include "cpa/distribution.hpp"

namespace cpa {

// Rate vector V over grid indices; rates[0] is ignored (a zero-size jump
// does not change the sum).
struct CompoundPoissonSpec {
  std::vector<double> rates;

  double lambda() const;
};

// Builds rates from exact per-index masses (e.g. a signature times its
// granularity).
CompoundPoissonSpec make_cpd_spec(const std::vector<Rational>& masses);

// PMF of sum_{j<=N} Y_j with N ~ Poisson(lambda) and Pr[Y_j = k] = V_k /
// lambda, by the Panjer recursion p_0 = e^{-lambda},
// p_m = (1/m) sum_k k V_k p_{m-k}. Indices above cap_index, or beyond the point
// where the remaining mass drops below tail_tol, are folded into overflow.
RealDistribution compound_poisson_pmf(const SizeGrid& grid, const CompoundPoissonSpec& spec,
                                      std::size_t cap_index, double tail_tol = 1e-12);

}  // namespace cpa
