#include "cpa/discretize.hpp"

#include <algorithm>
#include <stdexcept>

namespace cpa {

void RawItem::validate() const {
  if (law.empty()) throw std::invalid_argument("item " + id + ": empty law");
  Rational total = 0;
  for (const Realization& r : law) {
    if (r.prob <= 0) throw std::invalid_argument("item " + id + ": probabilities must be positive");
    if (r.size < 0) throw std::invalid_argument("item " + id + ": negative size");
    if (r.profit < 0) throw std::invalid_argument("item " + id + ": negative profit");
    total += r.prob;
  }
  if (total != 1) throw std::invalid_argument("item " + id + ": probabilities sum to " + to_string(total));
}

SparseLaw RawItem::size_law() const {
  SparseLaw out;
  for (const Realization& r : law) out.atoms[r.size] += r.prob;
  return out;
}

Rational RawItem::expected_size() const {
  Rational acc = 0;
  for (const Realization& r : law) acc += r.size * r.prob;
  return acc;
}

Rational RawItem::expected_profit() const {
  Rational acc = 0;
  for (const Realization& r : law) acc += r.profit * r.prob;
  return acc;
}

DiscretizedItem::DiscretizedItem(std::string id_, Distribution dist, std::vector<Rational> profit)
    : id(std::move(id_)), size_dist(std::move(dist)), eff_profit(std::move(profit)) {
  if (eff_profit.size() > size_dist.mass().size()) {
    for (std::size_t k = size_dist.mass().size(); k < eff_profit.size(); ++k) {
      if (eff_profit[k] != 0) throw std::invalid_argument("item " + id + ": profit outside the size support");
    }
  }
  eff_profit.resize(size_dist.mass().size(), Rational(0));
  for (std::size_t k = 0; k < eff_profit.size(); ++k) {
    if (eff_profit[k] < 0) throw std::invalid_argument("item " + id + ": negative effective profit");
    if (eff_profit[k] != 0 && size_dist.mass()[k] == 0 && k != 0) {
      throw std::invalid_argument("item " + id + ": profit outside the size support");
    }
  }
}

Rational DiscretizedItem::total_profit() const {
  Rational acc = 0;
  for (const Rational& p : eff_profit) acc += p;
  return acc;
}

std::map<Rational, Rational> effective_profit(const RawItem& item) {
  std::map<Rational, Rational> out;
  for (const Realization& r : item.law) out[r.size] += r.profit * r.prob;
  return out;
}

DiscretizedItem discretize_item(const RawItem& item, const SizeGrid& grid) {
  item.validate();
  const Rational& eps4 = grid.small_threshold();
  std::vector<Rational> mass(grid.size_count(), Rational(0));
  std::vector<Rational> profit(grid.size_count(), Rational(0));
  std::vector<CouplingAtom> coupling;
  std::optional<SplitRecord> split;

  // Merge realizations sharing a size; the split acts on whole atoms.
  struct Atom {
    Rational size, prob, eff;
  };
  std::map<Rational, Atom> atoms;
  for (const Realization& r : item.law) {
    if (r.size > grid.max_size()) {
      throw std::invalid_argument("item " + item.id + ": size " + to_string(r.size) + " exceeds the grid");
    }
    Atom& a = atoms[r.size];
    a.size = r.size;
    a.prob += r.prob;
    a.eff += r.profit * r.prob;
  }

  // Small region: move mass onto {0, eps4} preserving E[X 1{small}].
  std::vector<const Atom*> small;
  Rational small_mean = 0;
  for (const auto& [s, a] : atoms) {
    if (s <= eps4) {
      small.push_back(&a);
      small_mean += s * a.prob;
    }
  }
  if (!small.empty()) {
    const std::size_t top = grid.small_index();
    const Rational required = eps4 == 0 ? Rational(0) : Rational(small_mean / eps4);
    Rational placed = 0;
    // Largest atoms go up first; the crossing atom is split.
    for (auto it = small.rbegin(); it != small.rend(); ++it) {
      const Atom& a = **it;
      const Rational need = required - placed;
      Rational up = 0;
      if (need >= a.prob) {
        up = a.prob;
      } else if (need > 0) {
        up = need;
      }
      const Rational down = a.prob - up;
      placed += up;
      if (up > 0 && down > 0) split = SplitRecord{a.size, down, up};
      if (up > 0) {
        const Rational share = a.eff * up / a.prob;
        mass[top] += up;
        profit[top] += share;
        coupling.push_back({a.size, up, share, top});
      }
      if (down > 0) {
        const Rational share = a.eff * down / a.prob;
        mass[0] += down;
        profit[0] += share;
        coupling.push_back({a.size, down, share, 0});
      }
    }
  }

  // Large region: round down to the grid.
  for (const auto& [s, a] : atoms) {
    if (s <= eps4) continue;
    const std::size_t k = grid.floor_index(s);
    mass[k] += a.prob;
    profit[k] += a.eff;
    coupling.push_back({a.size, a.prob, a.eff, k});
  }

  std::sort(coupling.begin(), coupling.end(), [](const CouplingAtom& x, const CouplingAtom& y) {
    if (x.size != y.size) return x.size < y.size;
    return x.index < y.index;
  });
  DiscretizedItem out(item.id, Distribution(grid, std::move(mass)), std::move(profit));
  out.coupling = std::move(coupling);
  out.split = split;
  return out;
}

DiscretizedItem make_grid_item(std::string id, const Distribution& size_dist, std::vector<Rational> eff_profit) {
  DiscretizedItem out(std::move(id), size_dist, std::move(eff_profit));
  auto m = size_dist.mass();
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] == 0) continue;
    out.coupling.push_back({size_dist.grid().size_at(k), m[k], out.profit_at(k), k});
  }
  return out;
}

}  // namespace cpa
