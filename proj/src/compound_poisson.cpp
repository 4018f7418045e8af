#include "cpa/compound_poisson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cpa {

double CompoundPoissonSpec::lambda() const {
  double total = 0.0;
  for (std::size_t k = 1; k < rates.size(); ++k) total += rates[k];
  return total;
}

CompoundPoissonSpec make_cpd_spec(const std::vector<Rational>& masses) {
  CompoundPoissonSpec spec;
  spec.rates.resize(masses.size(), 0.0);
  for (std::size_t k = 1; k < masses.size(); ++k) spec.rates[k] = to_double(masses[k]);
  return spec;
}

RealDistribution compound_poisson_pmf(const SizeGrid& grid, const CompoundPoissonSpec& spec,
                                      std::size_t cap_index, double tail_tol) {
  if (tail_tol <= 0) throw std::invalid_argument("tail tolerance must be positive");
  for (std::size_t k = 1; k < spec.rates.size(); ++k) {
    if (!(spec.rates[k] >= 0) || !std::isfinite(spec.rates[k])) {
      throw std::invalid_argument("compound Poisson rates must be finite and nonnegative");
    }
  }
  const double lambda = spec.lambda();
  if (lambda > 700.0) throw std::overflow_error("compound Poisson rate too large for e^-lambda");
  cap_index = std::min(cap_index, grid.max_index());

  std::vector<double> p;
  p.reserve(cap_index + 1);
  p.push_back(std::exp(-lambda));
  double kept = p[0];
  const std::size_t kmax = spec.rates.empty() ? 0 : spec.rates.size() - 1;
  for (std::size_t m = 1; m <= cap_index; ++m) {
    if (1.0 - kept < tail_tol) break;
    double acc = 0.0;
    for (std::size_t k = 1; k <= std::min(m, kmax); ++k) {
      if (spec.rates[k] == 0.0) continue;
      acc += static_cast<double>(k) * spec.rates[k] * p[m - k];
    }
    p.push_back(acc / static_cast<double>(m));
    kept += p.back();
  }
  const double overflow = std::max(0.0, 1.0 - kept);
  return RealDistribution(grid, std::move(p), overflow);
}

}  // namespace cpa
