#include "cpa/eum.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <unordered_map>

#include "cpa/errors.hpp"

namespace cpa {

void UtilityFunction::validate() const {
  if (breakpoints.empty()) throw std::invalid_argument("utility needs at least one breakpoint");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const auto& [x, v] = breakpoints[i];
    if (v < 0 || v > 1) throw std::invalid_argument("utility values must lie in [0, 1]");
    if (x < 0) throw std::invalid_argument("utility breakpoints must be nonnegative");
    if (i > 0 && !(breakpoints[i - 1].first < x)) {
      throw std::invalid_argument("utility breakpoints must be strictly increasing");
    }
  }
}

Rational UtilityFunction::operator()(const Rational& x) const {
  if (x <= breakpoints.front().first) return breakpoints.front().second;
  if (x >= breakpoints.back().first) return breakpoints.back().second;
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x,
                             [](const Rational& v, const auto& bp) { return v < bp.first; });
  const auto& [x1, v1] = *it;
  const auto& [x0, v0] = *(it - 1);
  return v0 + (v1 - v0) * (x - x0) / (x1 - x0);
}

bool UtilityFunction::is_nonincreasing() const {
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (breakpoints[i].second > breakpoints[i - 1].second) return false;
  }
  return true;
}

Rational UtilityFunction::lipschitz() const {
  Rational best = 0;
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    Rational slope = (breakpoints[i].second - breakpoints[i - 1].second) /
                     (breakpoints[i].first - breakpoints[i - 1].first);
    if (slope < 0) slope = -slope;
    best = std::max(best, slope);
  }
  return best;
}

UtilityFunction UtilityFunction::threshold_surrogate(const Rational& eps) {
  if (eps <= 0) throw std::invalid_argument("eps must be positive");
  return UtilityFunction{{{Rational(0), Rational(1)}, {Rational(1), Rational(1)}, {Rational(1) + eps, Rational(0)}}};
}

UtilityFunction UtilityFunction::constant(const Rational& value) {
  return UtilityFunction{{{Rational(0), value}}};
}

FeasibilityStructure FeasibilityStructure::cardinality(std::size_t k) {
  FeasibilityStructure s;
  s.kind = StructureKind::Cardinality;
  s.k = k;
  return s;
}

FeasibilityStructure FeasibilityStructure::knapsack(Rational budget, std::vector<Rational> costs) {
  FeasibilityStructure s;
  s.kind = StructureKind::Knapsack;
  s.budget = std::move(budget);
  s.costs = std::move(costs);
  return s;
}

FeasibilityStructure FeasibilityStructure::dag(std::size_t nodes, std::size_t source, std::size_t sink,
                                               std::vector<DagEdge> edges) {
  FeasibilityStructure s;
  s.kind = StructureKind::DagPath;
  s.node_count = nodes;
  s.source = source;
  s.sink = sink;
  s.edges = std::move(edges);
  return s;
}

namespace {

std::vector<std::size_t> topological_order(const FeasibilityStructure& s) {
  std::vector<std::size_t> indeg(s.node_count, 0);
  for (const DagEdge& e : s.edges) ++indeg[e.to];
  std::deque<std::size_t> ready;
  for (std::size_t v = 0; v < s.node_count; ++v) {
    if (indeg[v] == 0) ready.push_back(v);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    std::size_t v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (const DagEdge& e : s.edges) {
      if (e.from == v && --indeg[e.to] == 0) ready.push_back(e.to);
    }
  }
  if (order.size() != s.node_count) throw std::invalid_argument("structure graph has a cycle");
  return order;
}

bool dag_path_uses_exactly(const FeasibilityStructure& s, std::size_t node, std::vector<bool>& remaining,
                           std::size_t left) {
  if (node == s.sink && left == 0) return true;
  for (const DagEdge& e : s.edges) {
    if (e.from != node || !remaining[e.item]) continue;
    remaining[e.item] = false;
    bool ok = dag_path_uses_exactly(s, e.to, remaining, left - 1);
    remaining[e.item] = true;
    if (ok) return true;
  }
  return false;
}

}  // namespace

void FeasibilityStructure::validate(std::size_t item_count) const {
  switch (kind) {
    case StructureKind::Cardinality:
      break;
    case StructureKind::Knapsack:
      if (costs.size() != item_count) throw std::invalid_argument("knapsack structure needs one cost per item");
      for (const Rational& c : costs) {
        if (c < 0) throw std::invalid_argument("knapsack costs must be nonnegative");
      }
      break;
    case StructureKind::DagPath:
      if (source >= node_count || sink >= node_count) throw std::invalid_argument("dag endpoints out of range");
      for (const DagEdge& e : edges) {
        if (e.from >= node_count || e.to >= node_count) throw std::invalid_argument("dag edge out of range");
        if (e.item >= item_count) throw std::invalid_argument("dag edge references an unknown item");
      }
      topological_order(*this);
      break;
  }
}

bool FeasibilityStructure::is_feasible(std::span<const std::size_t> chosen) const {
  switch (kind) {
    case StructureKind::Cardinality:
      return chosen.size() == k;
    case StructureKind::Knapsack: {
      Rational total = 0;
      for (std::size_t i : chosen) total += costs.at(i);
      return total <= budget;
    }
    case StructureKind::DagPath: {
      std::size_t n = 0;
      for (const DagEdge& e : edges) n = std::max(n, e.item + 1);
      for (std::size_t i : chosen) n = std::max(n, i + 1);
      std::vector<bool> remaining(n, false);
      for (std::size_t i : chosen) remaining[i] = true;
      if (chosen.empty()) return source == sink;
      return dag_path_uses_exactly(*this, source, remaining, chosen.size());
    }
  }
  return false;
}

namespace {

std::vector<Rational> utility_table(const SizeGrid& grid, const UtilityFunction& mu, const Rational& capacity,
                                    std::size_t& cap_index) {
  cap_index = std::min(grid.floor_index(capacity), grid.max_index());
  std::vector<Rational> table(cap_index + 1, Rational(0));
  for (std::size_t k = 0; k <= cap_index; ++k) {
    const Rational x = grid.size_at(k);
    table[k] = x < capacity ? mu(x) : Rational(0);
  }
  return table;
}

Rational utility_from_table(std::span<const DiscretizedItem> items, std::span<const std::size_t> chosen,
                            const std::vector<Rational>& table, std::size_t cap_index, const SizeGrid& grid) {
  Distribution acc = Distribution::point_mass(grid, 0);
  for (std::size_t i : chosen) acc = convolve(acc, items[i].size_dist, cap_index);
  Rational total = 0;
  auto m = acc.mass();
  for (std::size_t k = 0; k < m.size() && k < table.size(); ++k) {
    if (m[k] != 0) total += m[k] * table[k];
  }
  return total;
}

}  // namespace

Rational expected_utility(std::span<const DiscretizedItem> items, std::span<const std::size_t> chosen,
                          const UtilityFunction& mu, const Rational& capacity) {
  if (items.empty()) return capacity > 0 ? mu(Rational(0)) : Rational(0);
  std::size_t cap_index = 0;
  const SizeGrid& grid = items.front().grid();
  auto table = utility_table(grid, mu, capacity, cap_index);
  return utility_from_table(items, chosen, table, cap_index, grid);
}

Rational expected_utility(std::span<const DiscretizedItem> items, const UtilityFunction& mu, const Rational& capacity) {
  std::vector<std::size_t> all(items.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return expected_utility(items, all, mu, capacity);
}

Rational expected_utility_original(std::span<const RawItem> items, std::span<const std::size_t> chosen,
                                   const UtilityFunction& mu, const Rational& capacity) {
  SparseLaw acc = SparseLaw::zero();
  for (std::size_t i : chosen) acc = convolve(acc, items[i].size_law(), capacity);
  Rational total = 0;
  for (const auto& [s, p] : acc.atoms) {
    if (s < capacity) total += p * mu(s);
  }
  return total;
}

HeavyLight split_heavy_light(std::span<const DiscretizedItem> items, const Rational& cutoff) {
  HeavyLight out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    (items[i].expected_size() > cutoff ? out.heavy : out.light).push_back(i);
  }
  return out;
}

std::vector<std::vector<std::size_t>> enumerate_heavy_sets(std::span<const DiscretizedItem> items,
                                                           std::span<const std::size_t> heavy,
                                                           const FeasibilityStructure& structure,
                                                           const EumParams& params) {
  std::vector<Rational> mean(items.size());
  for (std::size_t i : heavy) mean[i] = items[i].expected_size();
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> current;

  auto admissible = [&](const Rational& total_mean, const Rational& total_cost) {
    if (params.heavy_budget && !current.empty() && !(total_mean < *params.heavy_budget)) return false;
    switch (structure.kind) {
      case StructureKind::Cardinality:
        return current.size() <= structure.k;
      case StructureKind::Knapsack:
        return total_cost <= structure.budget;
      case StructureKind::DagPath:
        return true;
    }
    return true;
  };

  auto rec = [&](auto&& self, std::size_t start, const Rational& total_mean, const Rational& total_cost) -> void {
    out.push_back(current);
    if (out.size() > params.max_heavy_sets) throw ResourceLimitError("heavy-set enumeration cap exceeded", out.size());
    if (current.size() >= params.max_heavy) return;
    for (std::size_t j = start; j < heavy.size(); ++j) {
      const std::size_t i = heavy[j];
      const Rational m = total_mean + mean[i];
      const Rational c = structure.kind == StructureKind::Knapsack ? total_cost + structure.costs[i] : total_cost;
      current.push_back(i);
      if (admissible(m, c)) self(self, j + 1, m, c);
      current.pop_back();
    }
  };
  if (admissible(Rational(0), Rational(0))) rec(rec, 0, Rational(0), Rational(0));
  return out;
}

namespace {

using Counts = std::vector<std::int64_t>;

struct DpState {
  Counts counts;
  std::size_t aux = 0;  // count of chosen items, or DAG node
  std::size_t aux2 = 0;  // DAG: heavy edges used
  Rational cost = 0;
  std::vector<std::size_t> witness;
};

Counts make_key(const DpState& s) {
  Counts key = s.counts;
  key.push_back(static_cast<std::int64_t>(s.aux));
  key.push_back(static_cast<std::int64_t>(s.aux2));
  return key;
}

bool counts_leq(const Counts& a, const Counts& b, const Rational& slack) {
  const Rational factor = 1 + slack;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] <= b[k]) continue;
    if (slack == 0 || Rational(a[k]) > factor * b[k]) return false;
  }
  return true;
}

class StateTable {
 public:
  explicit StateTable(std::size_t cap) : cap_(cap) {}

  // Inserts s unless an equal key exists; with keep_cheaper, a cheaper state
  // replaces the stored one.
  void offer(DpState s, bool keep_cheaper) {
    Counts key = make_key(s);
    auto it = index_.find(key);
    if (it == index_.end()) {
      index_.emplace(std::move(key), states_.size());
      states_.push_back(std::move(s));
      if (states_.size() > cap_) throw ResourceLimitError("signature DP state cap exceeded", states_.size());
      return;
    }
    if (keep_cheaper && s.cost < states_[it->second].cost) states_[it->second] = std::move(s);
  }

  std::vector<DpState>& states() { return states_; }

  // Keeps states not dominated by an earlier kept state of the same group.
  void prune(const Rational& slack, bool use_cost) {
    std::vector<DpState> kept;
    for (DpState& s : states_) {
      bool dominated = false;
      for (const DpState& t : kept) {
        if (t.aux == s.aux && t.aux2 == s.aux2 && (!use_cost || t.cost <= s.cost) &&
            counts_leq(t.counts, s.counts, slack)) {
          dominated = true;
          break;
        }
      }
      if (dominated) continue;
      std::erase_if(kept, [&](const DpState& t) {
        return t.aux == s.aux && t.aux2 == s.aux2 && (!use_cost || s.cost <= t.cost) &&
               counts_leq(s.counts, t.counts, Rational(0));
      });
      kept.push_back(std::move(s));
    }
    states_ = std::move(kept);
    index_.clear();
    for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(make_key(states_[i]), i);
  }

 private:
  std::size_t cap_;
  std::vector<DpState> states_;
  std::unordered_map<Counts, std::size_t, Int64VectorHash> index_;
};

void add_into(Counts& a, const Counts& b) {
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
}

}  // namespace

std::vector<SignatureWitness> reachable_signature_dp(std::span<const DiscretizedItem> items,
                                                     std::span<const std::size_t> light,
                                                     const FeasibilityStructure& structure,
                                                     std::span<const std::size_t> heavy_set,
                                                     const EumParams& params, bool mono) {
  const Rational& q = params.granularity;
  const std::size_t z = items.empty() ? 1 : items.front().grid().size_count();
  std::vector<Counts> sig(items.size());
  std::vector<bool> is_light(items.size(), false), in_h(items.size(), false);
  for (std::size_t i : light) {
    is_light[i] = true;
    sig[i] = item_signature(items[i], q).counts;
  }
  for (std::size_t i : heavy_set) in_h[i] = true;

  auto to_result = [&](std::vector<DpState>& finals) {
    std::vector<SignatureWitness> out;
    out.reserve(finals.size());
    for (DpState& s : finals) {
      Signature sg(q, 0);
      sg.counts = std::move(s.counts);
      std::sort(s.witness.begin(), s.witness.end());
      out.push_back({std::move(sg), std::move(s.witness)});
    }
    return out;
  };

  StateTable table(params.max_states);
  DpState init;
  init.counts.assign(z, 0);

  switch (structure.kind) {
    case StructureKind::Cardinality: {
      if (heavy_set.size() > structure.k) return {};
      const std::size_t need = structure.k - heavy_set.size();
      table.offer(init, false);
      for (std::size_t i : light) {
        const std::size_t n0 = table.states().size();
        for (std::size_t j = 0; j < n0; ++j) {
          const DpState& s = table.states()[j];
          if (s.aux >= need) continue;
          DpState t = s;
          add_into(t.counts, sig[i]);
          t.aux += 1;
          t.witness.push_back(i);
          table.offer(std::move(t), false);
        }
        if (mono) table.prune(params.mono_slack, false);
      }
      std::vector<DpState> finals;
      for (DpState& s : table.states()) {
        if (s.aux == need) finals.push_back(std::move(s));
      }
      return to_result(finals);
    }
    case StructureKind::Knapsack: {
      Rational heavy_cost = 0;
      for (std::size_t i : heavy_set) heavy_cost += structure.costs.at(i);
      if (heavy_cost > structure.budget) return {};
      init.cost = heavy_cost;
      table.offer(init, true);
      for (std::size_t i : light) {
        const std::size_t n0 = table.states().size();
        for (std::size_t j = 0; j < n0; ++j) {
          const DpState& s = table.states()[j];
          Rational c = s.cost + structure.costs.at(i);
          if (c > structure.budget) continue;
          DpState t = s;
          add_into(t.counts, sig[i]);
          t.cost = std::move(c);
          t.witness.push_back(i);
          table.offer(std::move(t), true);
        }
        if (mono) table.prune(params.mono_slack, true);
      }
      return to_result(table.states());
    }
    case StructureKind::DagPath: {
      const auto order = topological_order(structure);
      init.aux = structure.source;
      table.offer(init, false);
      std::vector<DpState> finals;
      for (std::size_t u : order) {
        if (mono) table.prune(params.mono_slack, false);
        const std::size_t n0 = table.states().size();
        for (std::size_t j = 0; j < n0; ++j) {
          if (table.states()[j].aux != u) continue;
          for (const DagEdge& e : structure.edges) {
            if (e.from != u) continue;
            const DpState& s = table.states()[j];
            DpState t = s;
            t.aux = e.to;
            if (is_light[e.item]) {
              add_into(t.counts, sig[e.item]);
              t.witness.push_back(e.item);
            } else if (in_h[e.item]) {
              t.aux2 += 1;
            } else {
              continue;
            }
            table.offer(std::move(t), false);
          }
        }
      }
      for (DpState& s : table.states()) {
        if (s.aux == structure.sink && s.aux2 == heavy_set.size()) finals.push_back(std::move(s));
      }
      return to_result(finals);
    }
  }
  return {};
}

namespace {

bool lex_less(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

EumSolution solve_impl(const EumInstance& inst, bool mono) {
  inst.utility.validate();
  inst.structure.validate(inst.items.size());
  if (inst.items.empty()) {
    if (!inst.structure.is_feasible(std::vector<std::size_t>{})) throw InfeasibleError("no feasible set");
    EumSolution sol;
    sol.utility_discretized = inst.utility(Rational(0));
    return sol;
  }
  const SizeGrid& grid = inst.items.front().grid();
  const Rational& capacity = grid.capacity();
  std::size_t cap_index = 0;
  const auto table = utility_table(grid, inst.utility, capacity, cap_index);

  const HeavyLight hl = split_heavy_light(inst.items, inst.params.heavy_cutoff);
  const auto heavy_sets = enumerate_heavy_sets(inst.items, hl.heavy, inst.structure, inst.params);

  EumSolution best;
  bool found = false;
  best.heavy_sets = heavy_sets.size();
  for (const auto& h : heavy_sets) {
    for (SignatureWitness& w : reachable_signature_dp(inst.items, hl.light, inst.structure, h, inst.params, mono)) {
      std::vector<std::size_t> set = h;
      set.insert(set.end(), w.light.begin(), w.light.end());
      std::sort(set.begin(), set.end());
      ++best.candidates;
      Rational u = utility_from_table(inst.items, set, table, cap_index, grid);
      Rational mean = 0;
      for (std::size_t i : set) mean += inst.items[i].expected_size();
      best.evaluated.emplace_back(u, mean);
      if (!found || u > best.utility_discretized || (u == best.utility_discretized && lex_less(set, best.chosen))) {
        found = true;
        best.utility_discretized = u;
        best.chosen = std::move(set);
      }
    }
  }
  if (!found) throw InfeasibleError("the feasible family is empty");
  for (std::size_t i : best.chosen) best.ids.push_back(inst.items[i].id);
  if (inst.raw.size() == inst.items.size()) {
    best.utility_original = expected_utility_original(inst.raw, best.chosen, inst.utility, capacity);
  }
  return best;
}

}  // namespace

EumSolution solve_eum(const EumInstance& instance) { return solve_impl(instance, false); }

EumSolution solve_eum_mono(const EumInstance& instance) {
  if (!instance.utility.is_nonincreasing()) throw ContractViolation("monotone solver needs a nonincreasing utility");
  return solve_impl(instance, true);
}

}  // namespace cpa
