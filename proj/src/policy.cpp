#include "cpa/policy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "cpa/errors.hpp"

namespace cpa {

int PolicyTree::child(int node, std::size_t k) const {
  const auto& ch = nodes[static_cast<std::size_t>(node)].children;
  auto it = ch.find(k);
  return it == ch.end() ? -1 : it->second;
}

void validate_policy(const PolicyTree& tree, std::span<const DiscretizedItem> items,
                     std::span<const std::size_t> group_of) {
  if (tree.root < 0) return;
  std::vector<std::size_t> path_items, path_groups;
  std::vector<int> visits(tree.nodes.size(), 0);
  std::function<void(int)> walk = [&](int v) {
    if (v < 0 || static_cast<std::size_t>(v) >= tree.nodes.size()) throw ContractViolation("dangling policy node");
    if (++visits[static_cast<std::size_t>(v)] > 1) throw ContractViolation("policy nodes must form a tree");
    const PolicyNode& node = tree.nodes[static_cast<std::size_t>(v)];
    if (node.item >= items.size()) throw ContractViolation("policy references an unknown item");
    if (std::find(path_items.begin(), path_items.end(), node.item) != path_items.end()) {
      throw ContractViolation("item repeats on a policy path");
    }
    if (!group_of.empty()) {
      const std::size_t g = group_of[node.item];
      if (std::find(path_groups.begin(), path_groups.end(), g) != path_groups.end()) {
        throw ContractViolation("group repeats on a policy path");
      }
      path_groups.push_back(g);
    }
    path_items.push_back(node.item);
    for (const auto& [k, c] : node.children) {
      if (k >= items[node.item].size_dist.mass().size() || items[node.item].size_dist.at(k) == 0) {
        throw ContractViolation("policy edge outside the item's support");
      }
      if (c >= 0) walk(c);
    }
    path_items.pop_back();
    if (!group_of.empty()) path_groups.pop_back();
  };
  walk(tree.root);
}

Rational evaluate_subtree(const PolicyTree& tree, int node, std::span<const DiscretizedItem> items, std::size_t used,
                          std::size_t cap_index) {
  if (node < 0 || used > cap_index) return 0;
  const PolicyNode& v = tree.nodes[static_cast<std::size_t>(node)];
  const DiscretizedItem& b = items[v.item];
  auto m = b.size_dist.mass();
  Rational total = 0;
  for (std::size_t k = 0; k < m.size() && used + k <= cap_index; ++k) {
    total += b.profit_at(k);
    if (m[k] == 0) continue;
    auto it = v.children.find(k);
    if (it != v.children.end() && it->second >= 0) {
      total += m[k] * evaluate_subtree(tree, it->second, items, used + k, cap_index);
    }
  }
  return total;
}

Rational evaluate_policy(const PolicyTree& tree, std::span<const DiscretizedItem> items, const Rational& capacity) {
  if (tree.root < 0 || items.empty() || capacity < 0) return 0;
  return evaluate_subtree(tree, tree.root, items, 0, items.front().grid().floor_index(capacity));
}

namespace {

Rational original_value(const PolicyTree& tree, int node, std::span<const DiscretizedItem> items, std::size_t used,
                        const Rational& actual, std::size_t cap_index, const Rational& actual_capacity) {
  if (node < 0) return 0;
  const PolicyNode& v = tree.nodes[static_cast<std::size_t>(node)];
  Rational total = 0;
  for (const CouplingAtom& a : items[v.item].coupling) {
    if (used + a.index > cap_index) continue;
    const Rational w = actual + a.size;
    if (w > actual_capacity) continue;
    total += a.eff_profit;
    auto it = v.children.find(a.index);
    if (it != v.children.end() && it->second >= 0) {
      total += a.prob * original_value(tree, it->second, items, used + a.index, w, cap_index, actual_capacity);
    }
  }
  return total;
}

}  // namespace

Rational evaluate_policy_original(const PolicyTree& tree, std::span<const DiscretizedItem> items,
                                  const Rational& disc_capacity, const Rational& actual_capacity) {
  if (tree.root < 0 || items.empty() || disc_capacity < 0 || actual_capacity < 0) return 0;
  const std::size_t cap_index = items.front().grid().floor_index(disc_capacity);
  return original_value(tree, tree.root, items, 0, Rational(0), cap_index, actual_capacity);
}

PolicyTree compact_policy(const PolicyTree& tree) {
  PolicyTree out;
  if (tree.root < 0) return out;
  std::function<int(int)> copy = [&](int v) -> int {
    const PolicyNode& src = tree.nodes[static_cast<std::size_t>(v)];
    const int id = static_cast<int>(out.nodes.size());
    out.nodes.push_back(PolicyNode{src.item, {}});
    for (const auto& [k, c] : src.children) {
      if (c < 0) continue;
      const int cc = copy(c);
      out.nodes[static_cast<std::size_t>(id)].children[k] = cc;
    }
    return id;
  };
  out.root = copy(tree.root);
  return out;
}

PolicyTree normalize_policy(const PolicyTree& input, std::span<const DiscretizedItem> items, const Rational& capacity) {
  PolicyTree tree = compact_policy(input);
  if (tree.root < 0 || items.empty()) return tree;
  const std::size_t cap_index = items.front().grid().floor_index(capacity);
  for (;;) {
    // Preorder listing with each node's consumed capacity and parent link.
    struct Entry {
      int node;
      std::size_t used;
      int parent;
      std::size_t parent_key;
      std::size_t depth;
    };
    std::vector<Entry> order;
    std::function<void(int, std::size_t, int, std::size_t, std::size_t)> list = [&](int v, std::size_t used, int parent,
                                                                                   std::size_t key, std::size_t depth) {
      order.push_back({v, used, parent, key, depth});
      for (const auto& [k, c] : tree.nodes[static_cast<std::size_t>(v)].children) {
        if (c >= 0 && used + k <= cap_index) list(c, used + k, v, k, depth + 1);
      }
    };
    list(tree.root, 0, -1, 0, 0);
    std::vector<Rational> value(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      value[i] = evaluate_subtree(tree, order[i].node, items, order[i].used, cap_index);
    }
    // First ancestor (preorder) with a strictly better descendant; take the best one.
    bool changed = false;
    for (std::size_t i = 0; i < order.size() && !changed; ++i) {
      std::size_t best = i;
      for (std::size_t j = i + 1; j < order.size() && order[j].depth > order[i].depth; ++j) {
        if (value[j] > value[best]) best = j;
      }
      if (best == i) continue;
      PolicyTree sub;
      sub.nodes = tree.nodes;
      sub.root = order[best].node;
      PolicyTree copy = compact_policy(sub);
      const int offset = static_cast<int>(tree.nodes.size());
      for (PolicyNode& n : copy.nodes) {
        for (auto& [k, c] : n.children) c += offset;
        tree.nodes.push_back(std::move(n));
      }
      const int new_root = copy.root + offset;
      if (order[i].parent < 0) {
        tree.root = new_root;
      } else {
        tree.nodes[static_cast<std::size_t>(order[i].parent)].children[order[i].parent_key] = new_root;
      }
      tree = compact_policy(tree);
      changed = true;
    }
    if (!changed) return tree;
  }
}

McEstimate mc_policy_value(const PolicyTree& tree, std::span<const DiscretizedItem> items, const Rational& capacity,
                           std::size_t samples, Rng& rng, SimulationMode mode) {
  if (samples == 0) throw std::invalid_argument("samples must be positive");
  if (tree.root < 0 || items.empty()) return {};
  const std::size_t cap_index = items.front().grid().floor_index(capacity);
  const double cap_d = to_double(capacity);

  // Per item: cumulative probabilities, grid indices, sizes and conditional profits.
  struct Table {
    std::vector<double> cum, size, profit;
    std::vector<std::size_t> index;
  };
  std::vector<Table> tables(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    Table& t = tables[i];
    double acc = 0;
    if (mode == SimulationMode::Discretized) {
      auto m = items[i].size_dist.mass();
      for (std::size_t k = 0; k < m.size(); ++k) {
        if (m[k] == 0) continue;
        acc += to_double(m[k]);
        t.cum.push_back(acc);
        t.index.push_back(k);
        t.size.push_back(0);
        t.profit.push_back(to_double(items[i].profit_at(k) / m[k]));
      }
    } else {
      for (const CouplingAtom& a : items[i].coupling) {
        acc += to_double(a.prob);
        t.cum.push_back(acc);
        t.index.push_back(a.index);
        t.size.push_back(to_double(a.size));
        t.profit.push_back(to_double(a.eff_profit / a.prob));
      }
    }
    if (!t.cum.empty()) t.cum.back() = 1.0;
  }

  double sum = 0, sum_sq = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    double collected = 0, actual = 0;
    std::size_t used = 0;
    int v = tree.root;
    while (v >= 0) {
      const PolicyNode& node = tree.nodes[static_cast<std::size_t>(v)];
      const Table& t = tables[node.item];
      const double u = uniform01(rng);
      std::size_t j = static_cast<std::size_t>(std::upper_bound(t.cum.begin(), t.cum.end(), u) - t.cum.begin());
      j = std::min(j, t.cum.size() - 1);
      used += t.index[j];
      actual += t.size[j];
      if (used > cap_index || actual > cap_d + 1e-12) break;
      collected += t.profit[j];
      v = tree.child(v, t.index[j]);
    }
    sum += collected;
    sum_sq += collected * collected;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  const double half = 1.959963984540054 * std::sqrt(var / n);
  return {mean, mean - half, mean + half};
}

}  // namespace cpa
