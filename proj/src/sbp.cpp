#include "cpa/sbp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cpa/compound_poisson.hpp"
#include "cpa/errors.hpp"
#include "cpa/lp.hpp"

namespace cpa {

HeavyClassification classify_heavy(std::span<const DiscretizedItem> items, const SbpParams& params) {
  if (params.heavy_granularity <= 0) throw std::invalid_argument("heavy granularity must be positive");
  HeavyClassification out;
  out.table.type_of.assign(items.size(), -1);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].expected_size() < params.heavy_cutoff) {
      out.light.push_back(i);
      continue;
    }
    auto m = items[i].size_dist.mass();
    std::vector<Rational> rounded(m.size());
    for (std::size_t k = 0; k < m.size(); ++k) {
      rounded[k] = params.heavy_granularity * floor_units(m[k], params.heavy_granularity);
    }
    Distribution d(items[i].grid(), std::move(rounded));
    auto it = std::find(out.table.types.begin(), out.table.types.end(), d);
    std::size_t t = static_cast<std::size_t>(it - out.table.types.begin());
    if (it == out.table.types.end()) {
      out.table.types.push_back(std::move(d));
      out.table.counts.push_back(0);
    }
    out.table.type_of[i] = static_cast<int>(t);
    out.table.counts[t] += 1;
  }
  return out;
}

namespace {

std::size_t overflow_cap(const SizeGrid& grid, const Rational& capacity) {
  return std::min(grid.ceil_index(capacity), grid.max_index());
}

RealDistribution heavy_sum(std::span<const std::size_t> arrangement, const HeavyTypeTable& table,
                           const SizeGrid& grid, std::size_t cap) {
  Distribution acc = Distribution::point_mass(grid, 0);
  for (std::size_t t = 0; t < arrangement.size(); ++t) {
    for (std::size_t r = 0; r < arrangement[t]; ++r) acc = convolve(acc, table.types.at(t), cap);
  }
  return to_real(acc);
}

double tail_with_light(const RealDistribution& heavy, const Signature& rsig, const SizeGrid& grid,
                       const Rational& capacity, std::size_t cap, double tail_tol) {
  const std::size_t first = grid.ceil_index(capacity);
  if (rsig.is_zero()) return upper_tail(heavy, first);
  RealDistribution light = compound_poisson_pmf(grid, make_cpd_spec(rsig.masses()), cap, tail_tol);
  return upper_tail(convolve(heavy, light, cap), first);
}

}  // namespace

double config_overflow_prob(const Configuration& cf, const HeavyTypeTable& table, const SizeGrid& grid,
                            const Rational& capacity, double tail_tol) {
  const std::size_t cap = overflow_cap(grid, capacity);
  return tail_with_light(heavy_sum(cf.arrangement, table, grid, cap), cf.rsig, grid, capacity, cap, tail_tol);
}

namespace {

template <class T>
T convert(const Rational& r) {
  if constexpr (std::is_same_v<T, Rational>) {
    return r;
  } else {
    return to_double(r);
  }
}

template <class T>
std::optional<Assignment> assign_light(std::span<const Configuration> configs, std::span<const DiscretizedItem> items,
                                       std::span<const std::size_t> light) {
  const std::size_t m = configs.size();
  LpProblem<T> lp;
  lp.num_vars = light.size() * m;
  for (std::size_t i = 0; i < light.size(); ++i) {
    typename LpProblem<T>::Row row;
    for (std::size_t j = 0; j < m; ++j) row.emplace_back(i * m + j, T(1));
    lp.eq_rows.push_back(std::move(row));
    lp.eq_rhs.push_back(T(1));
  }
  const std::size_t z = items.empty() ? 1 : items.front().grid().size_count();
  for (std::size_t j = 0; j < m; ++j) {
    const Signature& sg = configs[j].rsig;
    for (std::size_t k = 1; k < z; ++k) {
      typename LpProblem<T>::Row row;
      for (std::size_t i = 0; i < light.size(); ++i) {
        const Rational mass = items[light[i]].size_dist.at(k);
        if (mass != 0) row.emplace_back(i * m + j, convert<T>(mass));
      }
      if (row.empty()) continue;
      const std::int64_t c = k < sg.counts.size() ? sg.counts[k] : 0;
      lp.le_rows.push_back(std::move(row));
      lp.le_rhs.push_back(convert<T>(sg.granularity * c));
    }
  }
  LpResult<T> res = find_basic_feasible(lp);
  if (!res.feasible) return std::nullopt;

  Assignment out;
  out.bins.assign(m, {});
  out.lp_pivots = res.pivots;
  std::vector<std::size_t> fractional;
  for (std::size_t i = 0; i < light.size(); ++i) {
    bool placed = false;
    for (std::size_t j = 0; j < m && !placed; ++j) {
      const T& v = res.x[i * m + j];
      bool one;
      if constexpr (std::is_same_v<T, Rational>) {
        one = v == 1;
      } else {
        one = std::abs(v - 1.0) <= 1e-9;
      }
      if (one) {
        out.bins[j].push_back(light[i]);
        placed = true;
      }
    }
    if (!placed) fractional.push_back(light[i]);
  }
  std::sort(fractional.begin(), fractional.end());
  for (std::size_t t = 0; t < fractional.size(); ++t) out.bins[t % m].push_back(fractional[t]);
  out.fractional_items = fractional.size();
  return out;
}

}  // namespace

std::optional<Assignment> feasibility_test(std::span<const Configuration> configs,
                                           std::span<const DiscretizedItem> items, const HeavyClassification& cls,
                                           bool exact_lp) {
  const HeavyTypeTable& table = cls.table;
  const std::size_t m = configs.size();
  if (m == 0) {
    if (items.empty()) return Assignment{};
    return std::nullopt;
  }
  std::vector<std::size_t> total(table.types.size(), 0);
  for (const Configuration& cf : configs) {
    for (std::size_t t = 0; t < cf.arrangement.size(); ++t) {
      if (t >= total.size()) {
        if (cf.arrangement[t] != 0) return std::nullopt;
        continue;
      }
      total[t] += cf.arrangement[t];
    }
  }
  if (total != table.counts) return std::nullopt;

  std::optional<Assignment> out;
  if (cls.light.empty()) {
    out = Assignment{};
    out->bins.assign(m, {});
  } else if (exact_lp) {
    out = assign_light<Rational>(configs, items, cls.light);
  } else {
    out = assign_light<double>(configs, items, cls.light);
  }
  if (!out) return out;

  std::vector<std::vector<std::size_t>> pools(table.types.size());
  for (std::size_t i = 0; i < table.type_of.size(); ++i) {
    if (table.type_of[i] >= 0) pools[static_cast<std::size_t>(table.type_of[i])].push_back(i);
  }
  std::vector<std::size_t> next(pools.size(), 0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t t = 0; t < configs[j].arrangement.size(); ++t) {
      for (std::size_t r = 0; r < configs[j].arrangement[t]; ++r) out->bins[j].push_back(pools[t][next[t]++]);
    }
    std::sort(out->bins[j].begin(), out->bins[j].end());
  }
  return out;
}

Rational exact_overflow(std::span<const RawItem> items, std::span<const std::size_t> chosen, const Rational& capacity) {
  SparseLaw acc = SparseLaw::zero();
  for (std::size_t i : chosen) acc = convolve(acc, items[i].size_law(), capacity);
  return acc.prob_at_least(capacity);
}

namespace {

// Mixed-radix enumeration of all vectors v with 0 <= v[d] <= bound[d].
bool next_vector(std::vector<std::size_t>& v, const std::vector<std::size_t>& bound) {
  for (std::size_t d = 0; d < v.size(); ++d) {
    if (v[d] < bound[d]) {
      ++v[d];
      return true;
    }
    v[d] = 0;
  }
  return false;
}

struct Enumerator {
  const std::vector<Configuration>& configs;
  const std::vector<std::size_t>& heavy_counts;
  const std::vector<Rational>& light_mass;
  std::size_t max_candidates;
  std::size_t visited = 0;
  std::vector<std::size_t> chosen;
  std::vector<std::size_t> used;

  template <class Fn>
  bool run(std::size_t m, std::size_t start, Fn&& accept) {
    if (chosen.size() == m) {
      if (used != heavy_counts) return false;
      // The LP needs the rounded signatures to cover the light mass.
      for (std::size_t k = 1; k < light_mass.size(); ++k) {
        Rational cover = 0;
        for (std::size_t c : chosen) {
          const Signature& sg = configs[c].rsig;
          if (k < sg.counts.size()) cover += sg.granularity * sg.counts[k];
        }
        if (cover < light_mass[k]) return false;
      }
      if (++visited > max_candidates) throw ResourceLimitError("s-configuration enumeration cap exceeded", visited);
      return accept(chosen);
    }
    for (std::size_t c = start; c < configs.size(); ++c) {
      const auto& arr = configs[c].arrangement;
      bool fits = true;
      for (std::size_t t = 0; t < arr.size(); ++t) fits = fits && used[t] + arr[t] <= heavy_counts[t];
      if (!fits) continue;
      for (std::size_t t = 0; t < arr.size(); ++t) used[t] += arr[t];
      chosen.push_back(c);
      bool done = run(m, c, accept);
      chosen.pop_back();
      for (std::size_t t = 0; t < arr.size(); ++t) used[t] -= arr[t];
      if (done) return true;
    }
    return false;
  }
};

}  // namespace

PackingSolution solve_sbp(std::span<const RawItem> items, const Rational& p, const SizeGrid& grid,
                          const SbpParams& params) {
  if (!(p > 0 && p < 1)) throw std::invalid_argument("overflow probability must lie in (0, 1)");
  std::vector<DiscretizedItem> disc;
  disc.reserve(items.size());
  for (const RawItem& it : items) disc.push_back(discretize_item(it, grid));
  const HeavyClassification cls = classify_heavy(disc, params);
  const HeavyTypeTable& table = cls.table;

  PackingSolution sol;
  sol.relaxed_capacity = grid.capacity() * (1 + params.cap_relax);
  if (items.empty()) return sol;
  const Rational& cap_r = sol.relaxed_capacity;
  const Rational bound = p + params.prob_relax;
  const double bound_d = to_double(bound) + 1e-12;
  const std::size_t cap = overflow_cap(grid, cap_r);
  const std::size_t z = grid.size_count();
  const Rational& q = params.light_granularity;

  std::vector<Rational> light_mass(z, Rational(0));
  for (std::size_t i : cls.light) {
    auto m = disc[i].size_dist.mass();
    for (std::size_t k = 1; k < m.size(); ++k) light_mass[k] += m[k];
  }
  std::vector<std::size_t> support;
  std::vector<std::size_t> sig_bound;
  for (std::size_t k = 1; k < z; ++k) {
    if (light_mass[k] == 0) continue;
    support.push_back(k);
    sig_bound.push_back(static_cast<std::size_t>(ceil_units(light_mass[k], q)));
  }

  // Per arrangement, the maximal rounded signatures passing the overflow test.
  std::vector<Configuration> configs;
  std::vector<std::size_t> arr(table.types.size(), 0);
  do {
    const RealDistribution heavy = heavy_sum(arr, table, grid, cap);
    std::size_t box = 1;
    for (std::size_t b : sig_bound) box *= b + 1;
    std::vector<char> pass(box, 0);
    std::vector<std::size_t> v(support.size(), 0);
    std::size_t idx = 0;
    do {
      Signature sg(q, z);
      for (std::size_t d = 0; d < support.size(); ++d) sg.counts[support[d]] = static_cast<std::int64_t>(v[d]);
      pass[idx] = tail_with_light(heavy, sg, grid, cap_r, cap, params.cpd_tail_tol) <= bound_d;
      ++idx;
      if (idx == 1 && !pass[0]) break;
    } while (next_vector(v, sig_bound));
    if (!pass[0]) continue;

    std::fill(v.begin(), v.end(), 0);
    idx = 0;
    do {
      if (pass[idx]) {
        bool maximal = true;
        std::size_t stride = 1;
        for (std::size_t d = 0; d < support.size() && maximal; ++d) {
          if (v[d] < sig_bound[d] && pass[idx + stride]) maximal = false;
          stride *= sig_bound[d] + 1;
        }
        if (maximal) {
          Signature sg(q, z);
          for (std::size_t d = 0; d < support.size(); ++d) sg.counts[support[d]] = static_cast<std::int64_t>(v[d]);
          configs.push_back({arr, std::move(sg)});
          if (configs.size() > params.max_configurations) {
            throw ResourceLimitError("configuration cap exceeded", configs.size());
          }
        }
      }
      ++idx;
    } while (next_vector(v, sig_bound));
  } while (next_vector(arr, table.counts));

  Enumerator en{configs, table.counts, light_mass, params.max_candidates, 0, {},
                std::vector<std::size_t>(table.types.size(), 0)};
  for (std::size_t m = 1; m <= items.size(); ++m) {
    bool found = en.run(m, 0, [&](const std::vector<std::size_t>& chosen) {
      std::vector<Configuration> cfs;
      for (std::size_t c : chosen) cfs.push_back(configs[c]);
      ++sol.candidates_tested;
      auto assignment = feasibility_test(cfs, disc, cls, true);
      if (!assignment) return false;
      std::vector<Rational> overflow;
      for (const auto& bin : assignment->bins) {
        overflow.push_back(exact_overflow(items, bin, cap_r));
        if (overflow.back() > bound) return false;
      }
      sol.bins = assignment->bins;
      sol.overflow = std::move(overflow);
      sol.fractional_items = assignment->fractional_items;
      sol.configs = std::move(cfs);
      return true;
    });
    if (found) {
      // Empty bins carry no items and are dropped.
      for (std::size_t j = sol.bins.size(); j-- > 0;) {
        if (sol.bins[j].empty()) {
          sol.bins.erase(sol.bins.begin() + static_cast<std::ptrdiff_t>(j));
          sol.overflow.erase(sol.overflow.begin() + static_cast<std::ptrdiff_t>(j));
          sol.configs.erase(sol.configs.begin() + static_cast<std::ptrdiff_t>(j));
        }
      }
      return sol;
    }
  }
  throw InfeasibleError("no packing satisfies the overflow bound");
}

namespace {

struct Sampler {
  // Integer sizes over a common denominator when they fit, doubles otherwise.
  bool integral = false;
  std::vector<std::vector<double>> cum;
  std::vector<std::vector<std::int64_t>> isize;
  std::vector<std::vector<double>> dsize;
  std::int64_t icap = 0;
  double dcap = 0;

  Sampler(std::span<const RawItem> items, std::span<const std::size_t> chosen, const Rational& capacity) {
    BigInt den = boost::multiprecision::denominator(capacity);
    Rational max_total = capacity;
    for (std::size_t i : chosen) {
      Rational mx = 0;
      for (const Realization& r : items[i].law) {
        den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(r.size));
        mx = std::max(mx, r.size);
      }
      max_total += mx;
    }
    integral = max_total * den < Rational(BigInt(1) << 62);
    for (std::size_t i : chosen) {
      std::vector<double> c;
      std::vector<std::int64_t> is;
      std::vector<double> ds;
      double acc = 0;
      for (const Realization& r : items[i].law) {
        acc += to_double(r.prob);
        c.push_back(acc);
        ds.push_back(to_double(r.size));
        if (integral) is.push_back(boost::multiprecision::numerator(r.size * den).convert_to<std::int64_t>());
      }
      c.back() = 1.0;
      cum.push_back(std::move(c));
      isize.push_back(std::move(is));
      dsize.push_back(std::move(ds));
    }
    if (integral) icap = ceil_int(capacity * den).convert_to<std::int64_t>();
    dcap = to_double(capacity);
  }

  bool overflow(Rng& rng) const {
    std::int64_t isum = 0;
    double dsum = 0;
    for (std::size_t t = 0; t < cum.size(); ++t) {
      const double u = uniform01(rng);
      std::size_t j = static_cast<std::size_t>(std::upper_bound(cum[t].begin(), cum[t].end(), u) - cum[t].begin());
      j = std::min(j, cum[t].size() - 1);
      if (integral) {
        isum += isize[t][j];
      } else {
        dsum += dsize[t][j];
      }
    }
    return integral ? isum >= icap : dsum >= dcap;
  }
};

}  // namespace

McEstimate estimate_overflow_mc(std::span<const RawItem> items, std::span<const std::size_t> chosen,
                                const Rational& capacity, std::size_t samples, Rng& rng) {
  if (samples == 0) throw std::invalid_argument("samples must be positive");
  Sampler sampler(items, chosen, capacity);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) hits += sampler.overflow(rng) ? 1 : 0;
  const double n = static_cast<double>(samples);
  const double ph = static_cast<double>(hits) / n;
  const double z = 1.959963984540054;
  const double denom = 1 + z * z / n;
  const double center = (ph + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / denom;
  return {ph, std::max(0.0, center - half), std::min(1.0, center + half)};
}

NorelaxSolution solve_sbp_norelax(std::span<const RawItem> items, const Rational& p, const SizeGrid& grid,
                                  const SbpParams& params, Rng& rng) {
  NorelaxSolution out;
  PackingSolution base = solve_sbp(items, p, grid, params);
  out.base_bins = base.bins.size();
  const Rational& cap = base.relaxed_capacity;
  const double merge_bound = to_double((1 - params.norelax_eps) * p);
  out.packing.relaxed_capacity = cap;

  for (const auto& bin : base.bins) {
    std::vector<std::vector<std::size_t>> pieces;
    for (std::size_t i : bin) {
      const std::vector<std::size_t> single{i};
      if (exact_overflow(items, single, cap) > p) {
        throw InfeasibleError("item " + items[i].id + " violates the overflow bound on its own");
      }
      pieces.push_back(single);
    }
    bool merged = true;
    while (merged) {
      merged = false;
      for (std::size_t a = 0; a < pieces.size() && !merged; ++a) {
        for (std::size_t b = a + 1; b < pieces.size() && !merged; ++b) {
          std::vector<std::size_t> u = pieces[a];
          u.insert(u.end(), pieces[b].begin(), pieces[b].end());
          std::sort(u.begin(), u.end());
          // The estimate decides; the exact check only guards against sampling error.
          if (estimate_overflow_mc(items, u, cap, params.mc_samples, rng).estimate <= merge_bound &&
              exact_overflow(items, u, cap) <= p) {
            pieces[a] = std::move(u);
            pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(b));
            merged = true;
          }
        }
      }
    }
    out.pieces_per_bin.push_back(pieces.size());
    out.max_pieces = std::max(out.max_pieces, pieces.size());
    for (auto& piece : pieces) {
      out.packing.overflow.push_back(exact_overflow(items, piece, cap));
      out.packing.bins.push_back(std::move(piece));
    }
  }
  return out;
}

}  // namespace cpa
