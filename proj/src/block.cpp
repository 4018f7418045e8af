#include "cpa/block.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "cpa/errors.hpp"

namespace cpa {

std::size_t BlockTree::depth() const {
  std::function<std::size_t(int)> rec = [&](int b) -> std::size_t {
    if (b < 0) return 0;
    std::size_t best = 0;
    for (const auto& [t, c] : blocks[static_cast<std::size_t>(b)].children) best = std::max(best, rec(c));
    return best + 1;
  };
  return rec(root);
}

std::size_t BlockTree::max_branching() const {
  std::size_t best = 0;
  for (const Block& b : blocks) {
    std::size_t n = 0;
    for (const auto& [t, c] : b.children) n += c >= 0 ? 1 : 0;
    best = std::max(best, n);
  }
  return best;
}

namespace {

template <class P>
P convert(const Rational& r) {
  if constexpr (std::is_same_v<P, Rational>) {
    return r;
  } else {
    return to_double(r);
  }
}

template <class P>
struct ItemView {
  std::vector<P> mass;
  // cum_profit[r] = sum of p~(k) over k <= r.
  std::vector<P> cum_profit;
};

template <class P>
std::vector<ItemView<P>> make_views(std::span<const DiscretizedItem> items) {
  std::vector<ItemView<P>> views(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto m = items[i].size_dist.mass();
    views[i].mass.reserve(m.size());
    P acc(0);
    for (std::size_t k = 0; k < m.size(); ++k) {
      views[i].mass.push_back(convert<P>(m[k]));
      acc += convert<P>(items[i].profit_at(k));
      views[i].cum_profit.push_back(acc);
    }
  }
  return views;
}

template <class P>
P eval_block(const BlockTree& tree, int b, std::size_t used, std::size_t cap, const std::vector<ItemView<P>>& views) {
  if (b < 0 || used > cap) return P(0);
  const Block& block = tree.blocks[static_cast<std::size_t>(b)];
  const std::size_t room = cap - used;
  std::vector<P> dist(1, P(1));
  std::vector<P> next;
  P value(0);
  for (std::size_t i : block.items) {
    const ItemView<P>& v = views[i];
    for (std::size_t s = 0; s < dist.size(); ++s) {
      if (dist[s] == P(0)) continue;
      const std::size_t r = std::min(room - s, v.cum_profit.size() - 1);
      value += dist[s] * v.cum_profit[r];
    }
    const std::size_t top = std::min(room, dist.size() - 1 + v.mass.size() - 1);
    next.assign(top + 1, P(0));
    for (std::size_t s = 0; s < dist.size(); ++s) {
      if (dist[s] == P(0)) continue;
      for (std::size_t k = 0; k < v.mass.size() && s + k <= top; ++k) {
        if (v.mass[k] == P(0)) continue;
        next[s + k] += dist[s] * v.mass[k];
      }
    }
    dist.swap(next);
  }
  for (const auto& [t, c] : block.children) {
    if (c < 0 || t >= dist.size() || dist[t] == P(0)) continue;
    value += dist[t] * eval_block(tree, c, used + t, cap, views);
  }
  return value;
}

std::size_t cap_index_of(std::span<const DiscretizedItem> items, const Rational& capacity) {
  return items.front().grid().floor_index(capacity);
}

}  // namespace

Rational evaluate_block_tree(const BlockTree& tree, std::span<const DiscretizedItem> items, const Rational& capacity) {
  if (tree.root < 0 || items.empty() || capacity < 0) return 0;
  return eval_block(tree, tree.root, 0, cap_index_of(items, capacity), make_views<Rational>(items));
}

double evaluate_block_tree_real(const BlockTree& tree, std::span<const DiscretizedItem> items,
                                const Rational& capacity) {
  if (tree.root < 0 || items.empty() || capacity < 0) return 0;
  return eval_block(tree, tree.root, 0, cap_index_of(items, capacity), make_views<double>(items));
}

McEstimate mc_block_value(const BlockTree& tree, std::span<const DiscretizedItem> items, const Rational& capacity,
                          std::size_t samples, Rng& rng) {
  if (samples == 0) throw std::invalid_argument("samples must be positive");
  if (tree.root < 0 || items.empty()) return {};
  const std::size_t cap = cap_index_of(items, capacity);
  std::vector<RealDistribution> laws;
  std::vector<std::vector<double>> profit(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    laws.push_back(to_real(items[i].size_dist));
    auto m = items[i].size_dist.mass();
    for (std::size_t k = 0; k < m.size(); ++k) {
      profit[i].push_back(m[k] == 0 ? 0.0 : to_double(items[i].profit_at(k) / m[k]));
    }
  }
  double sum = 0, sum_sq = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    double collected = 0;
    std::size_t used = 0;
    int b = tree.root;
    while (b >= 0) {
      const Block& block = tree.blocks[static_cast<std::size_t>(b)];
      std::size_t total = 0;
      bool over = false;
      for (std::size_t i : block.items) {
        const std::size_t k = sample(laws[i], rng);
        if (k >= profit[i].size()) {
          over = true;
          continue;
        }
        total += k;
        if (!over && used + total <= cap) collected += profit[i][k];
      }
      if (over || used + total > cap) break;
      used += total;
      auto it = block.children.find(total);
      b = it == block.children.end() ? -1 : it->second;
    }
    sum += collected;
    sum_sq += collected * collected;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  const double half = 1.96 * std::sqrt(var / n);
  return {mean, mean - half, mean + half};
}

void validate_block_tree(const BlockTree& tree, std::span<const DiscretizedItem> items,
                         std::span<const std::size_t> group_of, const std::optional<BlockCaps>& caps) {
  if (tree.root < 0) return;
  std::vector<std::size_t> path;
  std::vector<int> visits(tree.blocks.size(), 0);
  std::function<void(int, std::size_t)> walk = [&](int b, std::size_t depth) {
    if (b < 0 || static_cast<std::size_t>(b) >= tree.blocks.size()) throw ContractViolation("dangling block");
    if (++visits[static_cast<std::size_t>(b)] > 1) throw ContractViolation("blocks must form a tree");
    const Block& block = tree.blocks[static_cast<std::size_t>(b)];
    if (caps && depth > caps->max_depth) throw ContractViolation("block depth cap violated");
    std::size_t branches = 0;
    for (const auto& [t, c] : block.children) branches += c >= 0 ? 1 : 0;
    if (caps && branches > caps->max_branching) throw ContractViolation("block branching cap violated");
    Rational mass = 0;
    const std::size_t mark = path.size();
    for (std::size_t i : block.items) {
      if (i >= items.size()) throw ContractViolation("block references an unknown item");
      const std::size_t key = group_of.empty() ? i : group_of[i];
      if (std::find(path.begin(), path.end(), key) != path.end()) {
        throw ContractViolation("item or group repeats on a block path");
      }
      path.push_back(key);
      mass += items[i].expected_size();
    }
    if (caps && block.items.size() > 1 && mass > caps->mass_cap) throw ContractViolation("block mass cap violated");
    for (const auto& [t, c] : block.children) {
      if (c >= 0) walk(c, depth + 1);
    }
    path.resize(mark);
  };
  walk(tree.root, 1);
}

BlockTree segment_partition(const PolicyTree& tree, std::span<const DiscretizedItem> items, const Rational& capacity,
                            const Rational& opt_estimate, const SegmentCaps& caps) {
  BlockTree out;
  if (tree.root < 0 || items.empty()) return out;
  const std::size_t cap = cap_index_of(items, capacity);
  std::map<std::pair<int, std::size_t>, Rational> memo;
  auto value = [&](int node, std::size_t used) -> Rational {
    if (node < 0 || used > cap) return 0;
    auto key = std::make_pair(node, used);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    Rational v = evaluate_subtree(tree, node, items, used, cap);
    memo.emplace(key, v);
    return v;
  };
  const Rational gap = caps.value_gap * opt_estimate;

  std::function<int(int, std::size_t, const Rational&)> build = [&](int v, std::size_t used,
                                                                     const Rational& path_mass) -> int {
    if (v < 0 || used > cap) return -1;
    const auto& first = tree.nodes[static_cast<std::size_t>(v)];
    Rational mass = items[first.item].expected_size();
    if (caps.path_budget && path_mass + mass > *caps.path_budget) return -1;
    std::vector<std::size_t> seg{first.item};
    int last = v;
    for (;;) {
      const int nxt = tree.child(last, 0);
      if (nxt < 0) break;
      const Rational m = items[tree.nodes[static_cast<std::size_t>(nxt)].item].expected_size();
      if (mass + m > caps.mass) break;
      if (caps.path_budget && path_mass + mass + m > *caps.path_budget) break;
      bool close = true;
      for (std::size_t s = 1; used + s <= cap && close; ++s) {
        Rational d = value(tree.child(v, s), used + s) - value(tree.child(nxt, s), used + s);
        if (d < 0) d = -d;
        close = d <= gap;
      }
      if (!close) break;
      seg.push_back(tree.nodes[static_cast<std::size_t>(nxt)].item);
      mass += m;
      last = nxt;
    }
    const int id = static_cast<int>(out.blocks.size());
    out.blocks.push_back(Block{seg, {}});
    // Support of the block total within the remaining room.
    std::vector<bool> reach(1, true);
    for (std::size_t i : seg) {
      auto mm = items[i].size_dist.mass();
      std::vector<bool> nr(std::min(cap - used, reach.size() - 1 + mm.size() - 1) + 1, false);
      for (std::size_t s = 0; s < reach.size(); ++s) {
        if (!reach[s]) continue;
        for (std::size_t k = 0; k < mm.size() && s + k < nr.size(); ++k) {
          if (mm[k] != 0) nr[s + k] = true;
        }
      }
      reach.swap(nr);
    }
    for (std::size_t t = 0; t < reach.size(); ++t) {
      if (!reach[t]) continue;
      const int c = tree.child(last, t);
      if (c < 0) continue;
      const int cid = build(c, used + t, path_mass + mass);
      if (cid >= 0) out.blocks[static_cast<std::size_t>(id)].children[t] = cid;
    }
    return id;
  };
  out.root = build(tree.root, 0, Rational(0));
  return out;
}

int Topology::parent(std::size_t slot) const {
  if (slot == 0) return -1;
  std::vector<std::size_t> p(slots[slot].begin(), slots[slot].end() - 1);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i] == p) return static_cast<int>(i);
  }
  return -1;
}

std::vector<Topology> enumerate_topologies(std::size_t cap_index, const TopologyCaps& caps) {
  std::vector<Topology> out;
  if (caps.max_blocks == 0) return out;
  using Path = std::vector<std::size_t>;
  auto sum = [](const Path& p) {
    std::size_t s = 0;
    for (std::size_t x : p) s += x;
    return s;
  };
  std::vector<Path> current{Path{}};
  // Slots are added in strictly increasing lexicographic order, so every
  // prefix-closed set is produced once.
  std::function<void()> rec = [&]() {
    Topology t;
    t.slots = current;
    std::sort(t.slots.begin(), t.slots.end());
    out.push_back(std::move(t));
    if (current.size() >= caps.max_blocks) return;
    const std::size_t n = current.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Path parent = current[i];
      // A path of length L ends in the (L + 1)-th block from the root.
      if (parent.size() + 2 > caps.max_depth) continue;
      std::size_t kids = 0;
      for (const Path& q : current) {
        kids += (q.size() == parent.size() + 1 && std::equal(parent.begin(), parent.end(), q.begin())) ? 1 : 0;
      }
      if (kids >= caps.max_branches) continue;
      for (std::size_t label = 0; sum(parent) + label <= cap_index; ++label) {
        Path child = parent;
        child.push_back(label);
        if (!(current.back() < child)) continue;
        current.push_back(child);
        rec();
        current.pop_back();
      }
    }
  };
  rec();
  return out;
}

FlatGroups flatten_groups(std::span<const ItemGroup> groups) {
  FlatGroups f;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    f.members.emplace_back();
    for (const DiscretizedItem& m : groups[g].members) {
      f.members.back().push_back(f.pool.size());
      f.pool.push_back(m);
      f.group_of.push_back(g);
    }
  }
  return f;
}

namespace {

bool density_before(const DiscretizedItem& a, std::size_t ia, const DiscretizedItem& b, std::size_t ib) {
  const Rational ea = a.expected_size(), eb = b.expected_size();
  const Rational pa = a.total_profit(), pb = b.total_profit();
  // Compare pa / ea with pb / eb, zero expected size first.
  if (ea == 0 || eb == 0) {
    if (ea == 0 && eb == 0) return pa != pb ? pa > pb : ia < ib;
    return ea == 0;
  }
  const Rational lhs = pa * eb, rhs = pb * ea;
  if (lhs != rhs) return lhs > rhs;
  return ia < ib;
}

void order_items(std::vector<std::size_t>& v, std::span<const DiscretizedItem> pool, BlockOrder order) {
  if (order == BlockOrder::Index) {
    std::sort(v.begin(), v.end());
  } else {
    std::sort(v.begin(), v.end(),
              [&](std::size_t a, std::size_t b) { return density_before(pool[a], a, pool[b], b); });
  }
}

}  // namespace

Rational greedy_opt_estimate(std::span<const ItemGroup> groups, const Rational& capacity) {
  FlatGroups f = flatten_groups(groups);
  if (f.pool.empty()) return 0;
  std::vector<std::size_t> order(f.pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  order_items(order, f.pool, BlockOrder::Density);
  BlockTree chain;
  chain.root = 0;
  chain.blocks.push_back(Block{});
  std::vector<bool> used(groups.size(), false);
  for (std::size_t i : order) {
    if (used[f.group_of[i]]) continue;
    used[f.group_of[i]] = true;
    chain.blocks[0].items.push_back(i);
  }
  Rational best = evaluate_block_tree(chain, f.pool, capacity);
  for (std::size_t i = 0; i < f.pool.size(); ++i) {
    BlockTree single;
    single.root = 0;
    single.blocks.push_back(Block{{i}, {}});
    best = std::max(best, evaluate_block_tree(single, f.pool, capacity));
  }
  return best;
}

namespace {

struct DpState {
  std::vector<std::int64_t> key;
  std::vector<std::vector<std::uint32_t>> slots;
  std::vector<Rational> mass;
};

// rank[i] is the position of pool item i in the within-block order.
std::vector<std::size_t> order_ranks(std::span<const DiscretizedItem> pool, BlockOrder order) {
  std::vector<std::size_t> all(pool.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  order_items(all, pool, order);
  std::vector<std::size_t> rank(pool.size());
  for (std::size_t r = 0; r < all.size(); ++r) rank[all[r]] = r;
  return rank;
}

BlockTree build_tree(const Topology& topo, const std::vector<std::vector<std::uint32_t>>& slots,
                     const std::vector<std::size_t>& rank) {
  const std::size_t n = topo.slots.size();
  // Keep slots that hold items or have a descendant holding items.
  std::vector<bool> keep(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (slots[s].empty()) continue;
    for (int a = static_cast<int>(s); a >= 0; a = topo.parent(static_cast<std::size_t>(a))) {
      keep[static_cast<std::size_t>(a)] = true;
    }
  }
  BlockTree tree;
  if (!keep[0]) return tree;
  std::vector<int> id(n, -1);
  for (std::size_t s = 0; s < n; ++s) {
    if (!keep[s]) continue;
    id[s] = static_cast<int>(tree.blocks.size());
    Block b;
    b.items.assign(slots[s].begin(), slots[s].end());
    std::sort(b.items.begin(), b.items.end(), [&](std::size_t x, std::size_t y) { return rank[x] < rank[y]; });
    tree.blocks.push_back(std::move(b));
  }
  for (std::size_t s = 1; s < n; ++s) {
    if (!keep[s]) continue;
    const int p = topo.parent(s);
    tree.blocks[static_cast<std::size_t>(id[static_cast<std::size_t>(p)])].children[topo.slots[s].back()] = id[s];
  }
  tree.root = 0;
  return tree;
}

}  // namespace

SkResult block_dp(std::span<const ItemGroup> groups, const Topology& topology, const Rational& capacity,
                  const SkParams& params, const Rational& opt_estimate) {
  SkResult result;
  FlatGroups flat = flatten_groups(groups);
  result.opt_estimate = opt_estimate;
  result.topologies = 1;
  if (flat.pool.empty() || opt_estimate <= 0) {
    result.pool = std::move(flat.pool);
    result.group_of = std::move(flat.group_of);
    return result;
  }
  const std::span<const DiscretizedItem> pool = flat.pool;
  const std::size_t z = pool.front().grid().size_count();
  const std::size_t nslots = topology.slots.size();
  const std::size_t width = 2 * z;

  std::vector<std::vector<std::int64_t>> sig(pool.size());
  std::vector<Rational> mean(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    BlockSignature b = item_block_signature(pool[i], params.profit_granularity, params.prob_granularity, opt_estimate);
    sig[i] = b.profit_counts;
    sig[i].resize(z, 0);
    sig[i].insert(sig[i].end(), b.prob_counts.begin(), b.prob_counts.end());
    sig[i].resize(width, 0);
    mean[i] = pool[i].expected_size();
  }

  // ancestor[s] has bit a set for every strict ancestor a of s.
  std::vector<std::uint32_t> ancestors(nslots, 0), descendants(nslots, 0);
  for (std::size_t s = 1; s < nslots; ++s) {
    for (int a = topology.parent(s); a >= 0; a = topology.parent(static_cast<std::size_t>(a))) {
      ancestors[s] |= 1u << a;
      descendants[static_cast<std::size_t>(a)] |= 1u << s;
    }
  }
  std::vector<std::vector<std::size_t>> antichains;
  for (std::uint32_t mask = 1; mask < (1u << nslots); ++mask) {
    bool ok = true;
    std::vector<std::size_t> members;
    for (std::size_t s = 0; s < nslots; ++s) {
      if (!(mask >> s & 1u)) continue;
      if (ancestors[s] & mask) ok = false;
      members.push_back(s);
    }
    if (ok) antichains.push_back(std::move(members));
  }

  std::vector<DpState> states;
  std::unordered_map<std::vector<std::int64_t>, std::size_t, Int64VectorHash> index;
  {
    DpState init;
    init.key.assign(nslots * width, 0);
    init.slots.assign(nslots, {});
    init.mass.assign(nslots, Rational(0));
    index.emplace(init.key, 0);
    states.push_back(std::move(init));
  }

  std::vector<std::int64_t> key;
  for (std::size_t g = 0; g < flat.members.size(); ++g) {
    const auto& members = flat.members[g];
    if (members.empty()) continue;
    const std::size_t n0 = states.size();
    for (std::size_t si = 0; si < n0; ++si) {
      std::uint32_t nonempty = 0;
      for (std::size_t s = 0; s < nslots; ++s) {
        if (!states[si].slots[s].empty()) nonempty |= 1u << s;
      }
      for (const auto& ac : antichains) {
        if (params.fixed_order) {
          bool ok = true;
          for (std::size_t s : ac) ok = ok && (descendants[s] & nonempty) == 0;
          if (!ok) continue;
        }
        std::vector<std::size_t> choice(ac.size(), 0);
        for (;;) {
          key = states[si].key;
          for (std::size_t a = 0; a < ac.size(); ++a) {
            const std::size_t s = ac[a];
            const std::size_t item = members[choice[a]];
            for (std::size_t k = 0; k < width; ++k) key[s * width + k] += sig[item][k];
          }
          if (!index.count(key)) {
            DpState next = states[si];
            bool ok = true;
            for (std::size_t a = 0; a < ac.size() && ok; ++a) {
              const std::size_t s = ac[a];
              const std::size_t item = members[choice[a]];
              next.slots[s].push_back(static_cast<std::uint32_t>(item));
              next.mass[s] += mean[item];
              if (next.slots[s].size() > 1 && next.mass[s] > params.block_mass_cap) ok = false;
            }
            if (ok) {
              next.key = key;
              index.emplace(key, states.size());
              states.push_back(std::move(next));
              if (states.size() > params.max_states) {
                throw ResourceLimitError("block DP state cap exceeded", states.size());
              }
            }
          }
          std::size_t d = 0;
          while (d < choice.size() && ++choice[d] == members.size()) choice[d++] = 0;
          if (d == choice.size()) break;
        }
      }
    }
  }
  result.states = states.size();

  // Rank witnesses in floating point, then settle near-ties exactly.
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(states.size());
  double best = 0;
  const auto rank = order_ranks(pool, params.order);
  const auto views = make_views<double>(pool);
  const std::size_t cap = cap_index_of(pool, capacity);
  for (std::size_t si = 0; si < states.size(); ++si) {
    BlockTree t = build_tree(topology, states[si].slots, rank);
    const double v = t.root < 0 ? 0.0 : eval_block(t, t.root, 0, cap, views);
    scored.emplace_back(v, si);
    best = std::max(best, v);
  }
  const double tol = 1e-9 * std::max(1.0, std::abs(best));
  bool have = false;
  for (const auto& [v, si] : scored) {
    if (v < best - tol) continue;
    BlockTree t = build_tree(topology, states[si].slots, rank);
    Rational exact = evaluate_block_tree(t, pool, capacity);
    if (!have || exact > result.value) {
      have = true;
      result.value = exact;
      result.tree = std::move(t);
    }
  }
  result.pool = std::move(flat.pool);
  result.group_of = std::move(flat.group_of);
  return result;
}

SkResult solve_gensk(std::span<const ItemGroup> groups, const Rational& capacity, const SkParams& params) {
  const Rational opt = params.opt_estimate ? *params.opt_estimate : greedy_opt_estimate(groups, capacity);
  FlatGroups flat = flatten_groups(groups);
  SkResult best;
  best.opt_estimate = opt;
  best.pool = flat.pool;
  best.group_of = flat.group_of;
  if (flat.pool.empty() || opt <= 0) return best;
  const std::size_t cap = flat.pool.front().grid().floor_index(capacity);
  const auto topologies = enumerate_topologies(cap, params.topology);
  std::size_t states = 0;
  bool have = false;
  for (const Topology& t : topologies) {
    SkResult r = block_dp(groups, t, capacity, params, opt);
    states += r.states;
    if (!have || r.value > best.value) {
      have = true;
      best.value = r.value;
      best.tree = std::move(r.tree);
    }
  }
  best.topologies = topologies.size();
  best.states = states;
  return best;
}

SkResult solve_sk(std::span<const DiscretizedItem> items, const Rational& capacity, const SkParams& params) {
  std::vector<ItemGroup> groups;
  groups.reserve(items.size());
  for (const DiscretizedItem& it : items) groups.push_back(ItemGroup{it.id, {it}});
  return solve_gensk(groups, capacity, params);
}

namespace {

std::map<Rational, std::pair<Rational, Rational>> law_key(const RawItem& it) {
  std::map<Rational, std::pair<Rational, Rational>> key;
  for (const Realization& r : it.law) {
    auto& e = key[r.size];
    e.first += r.prob;
    e.second += r.prob * r.profit;
  }
  return key;
}

}  // namespace

std::vector<RawItem> cancelation_laws(const RawItem& item) {
  item.validate();
  std::vector<RawItem> out{item};
  std::vector<Rational> points;
  for (const Realization& r : item.law) {
    if (r.size > 0) points.push_back(r.size);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<std::map<Rational, std::pair<Rational, Rational>>> seen{law_key(item)};
  for (const Rational& t : points) {
    RawItem member{item.id + "@" + to_string(t), {}};
    for (const Realization& r : item.law) {
      member.law.push_back({std::min(r.size, t), r.size < t ? r.profit : Rational(0), r.prob});
    }
    auto key = law_key(member);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(std::move(key));
    out.push_back(std::move(member));
  }
  return out;
}

ItemGroup expand_cancelations(const RawItem& item, const SizeGrid& grid) {
  ItemGroup g{item.id, {}};
  for (const RawItem& law : cancelation_laws(item)) {
    DiscretizedItem d = discretize_item(law, grid);
    bool dup = false;
    for (const DiscretizedItem& m : g.members) {
      dup = dup || (m.size_dist == d.size_dist && m.eff_profit == d.eff_profit);
    }
    if (!dup) g.members.push_back(std::move(d));
  }
  return g;
}

std::vector<std::size_t> signature_change_points(std::size_t count,
                                                 const std::function<std::vector<std::int64_t>(std::size_t)>& key_at) {
  std::vector<std::size_t> out;
  std::size_t i = 0;
  while (i < count) {
    out.push_back(i);
    const auto key = key_at(i);
    std::size_t lo = i, hi = count - 1;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo + 1) / 2;
      if (key_at(mid) == key) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    i = lo + 1;
  }
  return out;
}

}  // namespace cpa
