#include "cpa/instance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "cpa/bosp.hpp"
#include "cpa/errors.hpp"
#include "cpa/sbp.hpp"
#include "cpa/sku.hpp"

namespace cpa {

namespace {

enum class KnobType { Rational, Count, Flag };

const std::map<std::string, KnobType>& knob_types() {
  static const std::map<std::string, KnobType> types{
      {"p", KnobType::Rational},
      {"cap_relax", KnobType::Rational},
      {"prob_relax", KnobType::Rational},
      {"heavy_cutoff", KnobType::Rational},
      {"heavy_granularity", KnobType::Rational},
      {"light_granularity", KnobType::Rational},
      {"granularity", KnobType::Rational},
      {"profit_granularity", KnobType::Rational},
      {"prob_granularity", KnobType::Rational},
      {"eps", KnobType::Rational},
      {"relax", KnobType::Rational},
      {"opt_estimate", KnobType::Rational},
      {"mono_slack", KnobType::Rational},
      {"block_mass_cap", KnobType::Rational},
      {"norelax_eps", KnobType::Rational},
      {"max_heavy", KnobType::Count},
      {"max_blocks", KnobType::Count},
      {"max_depth", KnobType::Count},
      {"max_branches", KnobType::Count},
      {"max_states", KnobType::Count},
      {"mc_samples", KnobType::Count},
      {"fixed_order", KnobType::Flag},
      {"cancelations", KnobType::Flag},
      {"norelax", KnobType::Flag},
      {"mono", KnobType::Flag},
  };
  return types;
}

const std::set<std::string>& kinds() {
  static const std::set<std::string> k{"eum", "sbp", "sk", "gensk", "bosp", "sku"};
  return k;
}

void check_knob(const std::string& key, const Json& value) {
  auto it = knob_types().find(key);
  if (it == knob_types().end()) throw SchemaError("params: unknown field '" + key + "'");
  switch (it->second) {
    case KnobType::Rational:
      rational_from_json(value);
      break;
    case KnobType::Count:
      if (!value.is_number_integer() || value.get<std::int64_t>() < 0) throw SchemaError("params: '" + key + "' must be a nonnegative integer");
      break;
    case KnobType::Flag:
      if (!value.is_boolean()) throw SchemaError("params: '" + key + "' must be a boolean");
      break;
  }
}

Rational knob_rational(const InstanceFile& inst, const char* key, const Rational& fallback) {
  return inst.knobs.contains(key) ? rational_from_json(inst.knobs.at(key)) : fallback;
}

std::size_t knob_count(const InstanceFile& inst, const char* key, std::size_t fallback) {
  return inst.knobs.contains(key) ? inst.knobs.at(key).get<std::size_t>() : fallback;
}

bool knob_flag(const InstanceFile& inst, const char* key) {
  return inst.knobs.contains(key) && inst.knobs.at(key).get<bool>();
}

std::string json_string(const Json& j, const char* key, const char* where) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw SchemaError(std::string(where) + ": '" + key + "' must be a string");
  }
  return j.at(key).get<std::string>();
}

std::size_t json_count(const Json& j, const char* key, const char* where) {
  if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<std::int64_t>() < 0) {
    throw SchemaError(std::string(where) + ": '" + key + "' must be a nonnegative integer");
  }
  return j.at(key).get<std::size_t>();
}

}  // namespace

Json raw_item_to_json(const RawItem& item) {
  Json law = Json::array();
  for (const Realization& r : item.law) {
    law.push_back(Json{{"size", rational_to_json(r.size)},
                       {"profit", rational_to_json(r.profit)},
                       {"prob", rational_to_json(r.prob)}});
  }
  return Json{{"id", item.id}, {"law", law}};
}

RawItem raw_item_from_json(const Json& j) {
  require_keys(j, {"id", "law"}, "item");
  RawItem item{json_string(j, "id", "item"), {}};
  if (!j.contains("law") || !j.at("law").is_array()) throw SchemaError("item: 'law' must be an array");
  for (const Json& r : j.at("law")) {
    require_keys(r, {"size", "profit", "prob"}, "realization");
    if (!r.contains("size") || !r.contains("prob")) throw SchemaError("realization: needs size and prob");
    item.law.push_back({rational_from_json(r.at("size")),
                        r.contains("profit") ? rational_from_json(r.at("profit")) : Rational(0),
                        rational_from_json(r.at("prob"))});
  }
  try {
    item.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError("item " + item.id + ": " + e.what());
  }
  return item;
}

Json structure_to_json(const FeasibilityStructure& s) {
  switch (s.kind) {
    case StructureKind::Cardinality:
      return Json{{"kind", "cardinality"}, {"k", s.k}};
    case StructureKind::Knapsack: {
      Json costs = Json::array();
      for (const Rational& c : s.costs) costs.push_back(rational_to_json(c));
      return Json{{"kind", "knapsack"}, {"budget", rational_to_json(s.budget)}, {"costs", costs}};
    }
    case StructureKind::DagPath: {
      Json edges = Json::array();
      for (const DagEdge& e : s.edges) edges.push_back(Json{{"from", e.from}, {"to", e.to}, {"item", e.item}});
      return Json{{"kind", "dag"}, {"nodes", s.node_count}, {"source", s.source}, {"sink", s.sink}, {"edges", edges}};
    }
  }
  return Json();
}

FeasibilityStructure structure_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("structure: expected an object");
  const std::string kind = json_string(j, "kind", "structure");
  if (kind == "cardinality") {
    require_keys(j, {"kind", "k"}, "structure");
    return FeasibilityStructure::cardinality(json_count(j, "k", "structure"));
  }
  if (kind == "knapsack") {
    require_keys(j, {"kind", "budget", "costs"}, "structure");
    if (!j.contains("budget") || !j.contains("costs") || !j.at("costs").is_array()) {
      throw SchemaError("structure: knapsack needs budget and costs");
    }
    std::vector<Rational> costs;
    for (const Json& c : j.at("costs")) costs.push_back(rational_from_json(c));
    return FeasibilityStructure::knapsack(rational_from_json(j.at("budget")), std::move(costs));
  }
  if (kind == "dag") {
    require_keys(j, {"kind", "nodes", "source", "sink", "edges"}, "structure");
    if (!j.contains("edges") || !j.at("edges").is_array()) throw SchemaError("structure: dag needs edges");
    std::vector<DagEdge> edges;
    for (const Json& e : j.at("edges")) {
      require_keys(e, {"from", "to", "item"}, "edge");
      edges.push_back({json_count(e, "from", "edge"), json_count(e, "to", "edge"), json_count(e, "item", "edge")});
    }
    try {
      return FeasibilityStructure::dag(json_count(j, "nodes", "structure"), json_count(j, "source", "structure"),
                                       json_count(j, "sink", "structure"), std::move(edges));
    } catch (const std::invalid_argument& e) {
      throw SchemaError(std::string("structure: ") + e.what());
    }
  }
  throw SchemaError("structure: unknown kind '" + kind + "'");
}

namespace {

Json utility_to_json(const UtilityFunction& u) {
  Json bp = Json::array();
  for (const auto& [x, y] : u.breakpoints) bp.push_back(Json::array({rational_to_json(x), rational_to_json(y)}));
  return Json{{"breakpoints", bp}};
}

UtilityFunction utility_from_json(const Json& j) {
  require_keys(j, {"breakpoints"}, "utility");
  if (!j.contains("breakpoints") || !j.at("breakpoints").is_array()) {
    throw SchemaError("utility: 'breakpoints' must be an array");
  }
  UtilityFunction u;
  for (const Json& p : j.at("breakpoints")) {
    if (!p.is_array() || p.size() != 2) throw SchemaError("utility: breakpoints are [x, y] pairs");
    u.breakpoints.emplace_back(rational_from_json(p[0]), rational_from_json(p[1]));
  }
  try {
    u.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("utility: ") + e.what());
  }
  return u;
}

}  // namespace

InstanceFile parse_instance(const Json& j) {
  require_keys(j, {"version", "kind", "seed", "params", "items", "groups", "structure", "utility"}, "instance");
  InstanceFile inst;
  inst.version = json_string(j, "version", "instance");
  if (inst.version != kInstanceVersion) throw SchemaError("instance: unsupported version '" + inst.version + "'");
  inst.kind = json_string(j, "kind", "instance");
  if (!kinds().count(inst.kind)) throw SchemaError("instance: unknown kind '" + inst.kind + "'");
  if (j.contains("seed")) inst.seed = json_count(j, "seed", "instance");
  if (!j.contains("params") || !j.at("params").is_object()) throw SchemaError("instance: 'params' must be an object");
  const Json& params = j.at("params");
  if (!params.contains("grid")) throw SchemaError("params: missing 'grid'");
  inst.grid = grid_from_json(params.at("grid"));
  for (const auto& [key, value] : params.items()) {
    if (key == "grid") continue;
    check_knob(key, value);
    inst.knobs[key] = value;
  }
  std::set<std::string> ids;
  if (j.contains("items")) {
    if (!j.at("items").is_array()) throw SchemaError("instance: 'items' must be an array");
    for (const Json& it : j.at("items")) {
      inst.items.push_back(raw_item_from_json(it));
      if (!ids.insert(inst.items.back().id).second) throw SchemaError("instance: duplicate item id " + inst.items.back().id);
    }
  }
  if (j.contains("groups")) {
    if (!j.at("groups").is_array()) throw SchemaError("instance: 'groups' must be an array");
    for (const Json& g : j.at("groups")) {
      require_keys(g, {"id", "members"}, "group");
      RawGroup group{json_string(g, "id", "group"), {}};
      if (!g.contains("members") || !g.at("members").is_array() || g.at("members").empty()) {
        throw SchemaError("group: 'members' must be a nonempty array");
      }
      for (const Json& m : g.at("members")) {
        group.members.push_back(raw_item_from_json(m));
        if (!ids.insert(group.members.back().id).second) {
          throw SchemaError("instance: duplicate member id " + group.members.back().id);
        }
      }
      inst.groups.push_back(std::move(group));
    }
  }
  if (j.contains("structure")) {
    inst.structure = structure_from_json(j.at("structure"));
    try {
      inst.structure->validate(inst.items.size());
    } catch (const std::exception& e) {
      throw SchemaError(std::string("structure: ") + e.what());
    }
  }
  if (j.contains("utility")) inst.utility = utility_from_json(j.at("utility"));
  return inst;
}

Json serialize_instance(const InstanceFile& inst) {
  Json params = inst.knobs;
  params["grid"] = grid_to_json(inst.grid);
  Json j{{"version", inst.version}, {"kind", inst.kind}, {"seed", inst.seed}, {"params", params}};
  Json items = Json::array();
  for (const RawItem& it : inst.items) items.push_back(raw_item_to_json(it));
  j["items"] = items;
  if (!inst.groups.empty()) {
    Json groups = Json::array();
    for (const RawGroup& g : inst.groups) {
      Json members = Json::array();
      for (const RawItem& m : g.members) members.push_back(raw_item_to_json(m));
      groups.push_back(Json{{"id", g.id}, {"members", members}});
    }
    j["groups"] = groups;
  }
  if (inst.structure) j["structure"] = structure_to_json(*inst.structure);
  if (inst.utility) j["utility"] = utility_to_json(*inst.utility);
  return j;
}

void apply_params(InstanceFile& inst, const Json& overrides) {
  if (!overrides.is_object()) throw SchemaError("params override: expected an object");
  for (const auto& [key, value] : overrides.items()) {
    if (key == "grid") {
      inst.grid = grid_from_json(value);
      continue;
    }
    check_knob(key, value);
    inst.knobs[key] = value;
  }
}

Json block_tree_to_json(const BlockTree& tree, std::span<const DiscretizedItem> pool) {
  Json blocks = Json::array();
  for (const Block& b : tree.blocks) {
    Json items = Json::array();
    for (std::size_t i : b.items) items.push_back(pool[i].id);
    Json children = Json::object();
    for (const auto& [t, c] : b.children) children[std::to_string(t)] = c;
    blocks.push_back(Json{{"items", items}, {"children", children}});
  }
  return Json{{"root", tree.root}, {"blocks", blocks}};
}

BlockTree block_tree_from_json(const Json& j, std::span<const DiscretizedItem> pool) {
  require_keys(j, {"root", "blocks"}, "policy");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < pool.size(); ++i) index.emplace(pool[i].id, i);
  BlockTree tree;
  if (!j.contains("root") || !j.at("root").is_number_integer()) throw SchemaError("policy: 'root' must be an integer");
  tree.root = j.at("root").get<int>();
  if (!j.contains("blocks") || !j.at("blocks").is_array()) throw SchemaError("policy: 'blocks' must be an array");
  for (const Json& b : j.at("blocks")) {
    require_keys(b, {"items", "children"}, "block");
    Block block;
    for (const Json& id : b.at("items")) {
      auto it = index.find(id.get<std::string>());
      if (it == index.end()) throw SchemaError("policy: unknown item " + id.dump());
      block.items.push_back(it->second);
    }
    for (const auto& [key, value] : b.at("children").items()) {
      block.children[std::stoul(key)] = value.get<int>();
    }
    tree.blocks.push_back(std::move(block));
  }
  return tree;
}

namespace {

Rational random_prob(Rng& rng, std::size_t den) {
  return Rational(static_cast<long long>(1 + uniform_index(rng, den - 1)), static_cast<long long>(den));
}

RawItem generate_item(const std::string& family, const std::string& id, const SizeGrid& grid, Rng& rng) {
  const std::size_t top = grid.capacity_index();
  auto size_at = [&](std::size_t k) { return grid.size_at(k); };
  const Rational profit(static_cast<long long>(1 + uniform_index(rng, 10)));
  RawItem item{id, {}};
  if (family == "grid-bernoulli") {
    const Rational q = random_prob(rng, 16);
    const std::size_t k = 1 + uniform_index(rng, top);
    item.law = {{Rational(0), profit, 1 - q}, {size_at(k), profit, q}};
  } else if (family == "grid-uniform") {
    const std::size_t lo = uniform_index(rng, top);
    const std::size_t width = 2 + uniform_index(rng, 2);
    for (std::size_t j = 0; j < width; ++j) {
      item.law.push_back({size_at(std::min(top, lo + j)), profit, Rational(1, static_cast<long long>(width))});
    }
  } else if (family == "two-point") {
    const std::size_t small = 1 + uniform_index(rng, std::max<std::size_t>(1, top / 2));
    const std::size_t large = std::min(top, small + 1 + uniform_index(rng, top));
    const Rational p_small(static_cast<long long>(1 + uniform_index(rng, 5)));
    item.law = {{size_at(small), p_small, Rational(1, 2)}, {size_at(large), p_small * 2 + profit, Rational(1, 2)}};
  } else {
    throw SchemaError("unknown family '" + family + "'");
  }
  // Merge repeated sizes produced by clamping.
  std::map<std::pair<Rational, Rational>, Rational> merged;
  for (const Realization& r : item.law) merged[{r.size, r.profit}] += r.prob;
  item.law.clear();
  for (const auto& [sp, prob] : merged) item.law.push_back({sp.first, sp.second, prob});
  return item;
}

}  // namespace

InstanceFile generate_instance(const std::string& kind, std::size_t n, const std::string& family,
                               std::uint64_t seed) {
  if (!kinds().count(kind)) throw SchemaError("unknown kind '" + kind + "'");
  InstanceFile inst;
  inst.kind = kind;
  inst.seed = seed;
  inst.grid = SizeGrid(Rational(1, 8), Rational(1, 8), Rational(1), Rational(2));
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) inst.items.push_back(generate_item(family, "b" + std::to_string(i), inst.grid, rng));
  if (kind == "eum") {
    inst.structure = FeasibilityStructure::cardinality(std::max<std::size_t>(1, n / 2));
    inst.utility = UtilityFunction::threshold_surrogate(Rational(1, 4));
    inst.knobs["heavy_cutoff"] = "1/4";
  } else if (kind == "sbp") {
    inst.knobs["p"] = "1/5";
    inst.knobs["cap_relax"] = "1/10";
    inst.knobs["prob_relax"] = "1/20";
  } else if (kind == "sk" || kind == "gensk" || kind == "bosp") {
    inst.knobs["relax"] = "1/5";
    if (kind == "gensk") inst.knobs["cancelations"] = true;
  }
  return inst;
}

std::string report_csv_header() {
  return "instance_id,solver_value,oracle_value,gap,relaxed_capacity,wall_time_ms";
}

std::string report_csv_row(const ReportRow& row) {
  auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << row.instance_id << ',' << num(row.solver_value) << ',' << (row.oracle_value ? num(*row.oracle_value) : "")
     << ',' << (row.gap ? num(*row.gap) : "") << ',' << to_string(row.relaxed_capacity) << ','
     << num(row.wall_time_ms);
  return os.str();
}

namespace {

std::vector<DiscretizedItem> discretize_all(std::span<const RawItem> items, const SizeGrid& grid) {
  std::vector<DiscretizedItem> out;
  out.reserve(items.size());
  for (const RawItem& it : items) out.push_back(discretize_item(it, grid));
  return out;
}

SkParams sk_params(const InstanceFile& inst) {
  SkParams p;
  p.profit_granularity = knob_rational(inst, "profit_granularity", p.profit_granularity);
  p.prob_granularity = knob_rational(inst, "prob_granularity", p.prob_granularity);
  p.topology.max_blocks = knob_count(inst, "max_blocks", p.topology.max_blocks);
  p.topology.max_depth = knob_count(inst, "max_depth", p.topology.max_depth);
  p.topology.max_branches = knob_count(inst, "max_branches", p.topology.max_branches);
  p.block_mass_cap = knob_rational(inst, "block_mass_cap", p.block_mass_cap);
  p.max_states = knob_count(inst, "max_states", p.max_states);
  if (inst.knobs.contains("opt_estimate")) p.opt_estimate = rational_from_json(inst.knobs.at("opt_estimate"));
  return p;
}

std::vector<ItemGroup> sk_groups(const InstanceFile& inst) {
  std::vector<ItemGroup> groups;
  for (const RawGroup& g : inst.groups) {
    groups.push_back(ItemGroup{g.id, discretize_all(g.members, inst.grid)});
  }
  const bool cancel = knob_flag(inst, "cancelations");
  for (const RawItem& it : inst.items) {
    groups.push_back(cancel ? expand_cancelations(it, inst.grid) : ItemGroup{it.id, {discretize_item(it, inst.grid)}});
  }
  return groups;
}

Json rational_list(std::span<const Rational> values) {
  Json a = Json::array();
  for (const Rational& v : values) a.push_back(rational_to_json(v));
  return a;
}

}  // namespace

RunOutput run_instance(const InstanceFile& inst, const std::string& instance_id, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunOutput out;
  out.row.instance_id = instance_id;
  const Rational& capacity = inst.grid.capacity();
  out.row.relaxed_capacity = capacity;
  const std::uint64_t seed = options.seed ? *options.seed : inst.seed;
  Rng rng(seed);
  Json& sol = out.solution;
  sol["instance_id"] = instance_id;
  sol["kind"] = inst.kind;
  sol["seed"] = seed;
  sol["config"] = serialize_instance(inst).at("params");
  std::optional<double> solver_value;

  if (inst.kind == "eum") {
    EumInstance e;
    e.items = discretize_all(inst.items, inst.grid);
    e.raw = inst.items;
    e.structure = inst.structure ? *inst.structure : FeasibilityStructure::cardinality(inst.items.size());
    e.utility = inst.utility ? *inst.utility : UtilityFunction::threshold_surrogate(knob_rational(inst, "eps", Rational(1, 4)));
    e.params.heavy_cutoff = knob_rational(inst, "heavy_cutoff", capacity / 8);
    e.params.granularity = knob_rational(inst, "granularity", e.params.granularity);
    e.params.max_heavy = knob_count(inst, "max_heavy", e.params.max_heavy);
    e.params.max_states = knob_count(inst, "max_states", e.params.max_states);
    e.params.mono_slack = knob_rational(inst, "mono_slack", e.params.mono_slack);
    if (options.solver) {
      EumSolution s = knob_flag(inst, "mono") ? solve_eum_mono(e) : solve_eum(e);
      solver_value = to_double(s.utility_discretized);
      Json chosen = Json::array();
      for (const std::string& id : s.ids) chosen.push_back(id);
      sol["chosen"] = chosen;
      sol["utility_discretized"] = rational_to_json(s.utility_discretized);
      if (s.utility_original) sol["utility_original"] = rational_to_json(*s.utility_original);
      sol["heavy_sets"] = s.heavy_sets;
      sol["candidates"] = s.candidates;
    }
    if (options.with_oracle && !e.items.empty()) {
      EumOracleResult o = brute_force_eum(e, options.budget);
      out.row.oracle_value = to_double(o.utility);
      sol["oracle_utility"] = rational_to_json(o.utility);
    }
  } else if (inst.kind == "sbp") {
    SbpParams p;
    p.heavy_cutoff = knob_rational(inst, "heavy_cutoff", p.heavy_cutoff);
    p.heavy_granularity = knob_rational(inst, "heavy_granularity", p.heavy_granularity);
    p.light_granularity = knob_rational(inst, "light_granularity", p.light_granularity);
    p.cap_relax = knob_rational(inst, "cap_relax", p.cap_relax);
    p.prob_relax = knob_rational(inst, "prob_relax", p.prob_relax);
    p.norelax_eps = knob_rational(inst, "norelax_eps", p.norelax_eps);
    p.mc_samples = options.samples ? options.samples : knob_count(inst, "mc_samples", p.mc_samples);
    const Rational prob = knob_rational(inst, "p", Rational(1, 5));
    out.row.relaxed_capacity = (1 + p.cap_relax) * capacity;
    if (options.solver) {
      PackingSolution packing;
      if (knob_flag(inst, "norelax")) {
        NorelaxSolution nr = solve_sbp_norelax(inst.items, prob, inst.grid, p, rng);
        packing = std::move(nr.packing);
        sol["base_bins"] = nr.base_bins;
        sol["max_pieces"] = nr.max_pieces;
      } else {
        packing = solve_sbp(inst.items, prob, inst.grid, p);
      }
      out.row.relaxed_capacity = packing.relaxed_capacity;
      solver_value = static_cast<double>(packing.bins.size());
      Json bins = Json::array();
      for (const auto& bin : packing.bins) {
        Json b = Json::array();
        for (std::size_t i : bin) b.push_back(inst.items[i].id);
        bins.push_back(b);
      }
      sol["bins"] = bins;
      sol["overflow"] = rational_list(packing.overflow);
      sol["fractional_items"] = packing.fractional_items;
    }
    if (options.with_oracle) {
      auto o = brute_force_binpacking(inst.items, capacity, prob, Rational(0), options.budget);
      if (o) out.row.oracle_value = static_cast<double>(*o);
      sol["oracle_bins"] = o ? Json(*o) : Json();
    }
  } else if (inst.kind == "sk" || inst.kind == "gensk" || inst.kind == "bosp") {
    const Rational relax = knob_rational(inst, "relax", Rational(0));
    const Rational relaxed = (1 + relax) * capacity;
    out.row.relaxed_capacity = relaxed;
    SkResult r;
    std::vector<ItemGroup> groups;
    if (options.solver) {
      if (inst.kind == "bosp") {
        BospParams bp;
        bp.eps = knob_rational(inst, "eps", bp.eps);
        bp.sk = sk_params(inst);
        bp.fixed_order = knob_flag(inst, "fixed_order");
        if (bp.sk.opt_estimate) bp.opt_estimate = bp.sk.opt_estimate;
        BospResult b = solve_bosp(inst.items, inst.grid.with_capacity(relaxed), bp);
        r = std::move(b.sk);
      } else {
        groups = sk_groups(inst);
        SkParams sp = sk_params(inst);
        sp.fixed_order = knob_flag(inst, "fixed_order");
        r = solve_gensk(groups, relaxed, sp);
      }
      solver_value = to_double(r.value);
      sol["value"] = rational_to_json(r.value);
      sol["opt_estimate"] = rational_to_json(r.opt_estimate);
      sol["policy"] = block_tree_to_json(r.tree, r.pool);
      sol["topologies"] = r.topologies;
      sol["states"] = r.states;
      if (options.samples > 0 && !r.pool.empty()) {
        McEstimate mc = mc_block_value(r.tree, r.pool, relaxed, options.samples, rng);
        sol["mc"] = Json{{"estimate", mc.estimate}, {"lo", mc.lo}, {"hi", mc.hi}};
      }
    }
    if (options.with_oracle) {
      Rational o;
      if (inst.kind == "bosp") {
        o = brute_force_bosp(inst.items, inst.grid, knob_flag(inst, "fixed_order"), options.budget);
      } else {
        if (groups.empty()) groups = sk_groups(inst);
        o = brute_force_adaptive(groups, capacity, Rational(0), options.budget);
      }
      out.row.oracle_value = to_double(o);
      sol["oracle_value"] = rational_to_json(o);
    }
  } else if (inst.kind == "sku") {
    std::vector<DiscretizedItem> items = discretize_all(inst.items, inst.grid);
    if (options.solver) {
      SkuResult s = solve_sku(items, capacity);
      for (std::size_t k = 1; k < s.value.size(); ++k) {
        if (s.value[k] < s.value[k - 1]) throw ContractViolation("unlimited-copy values are not monotone");
      }
      solver_value = s.value.empty() ? 0.0 : to_double(s.value.back());
      sol["values"] = rational_list(s.value);
      Json policy = Json::array();
      for (int b : s.policy) policy.push_back(b < 0 ? Json() : Json(items[static_cast<std::size_t>(b)].id));
      sol["policy"] = policy;
    }
    if (options.with_oracle) {
      std::vector<double> v = sku_value_iteration(items, capacity);
      out.row.oracle_value = v.back();
      sol["oracle_value"] = v.back();
    }
  }

  if (solver_value) out.row.solver_value = *solver_value;
  if (solver_value && out.row.oracle_value) {
    out.row.gap = (*out.row.oracle_value - *solver_value) / std::max(*out.row.oracle_value, 1e-12);
  }
  out.row.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  sol["solver_value"] = solver_value ? Json(*solver_value) : Json();
  sol["oracle"] = out.row.oracle_value ? Json(*out.row.oracle_value) : Json();
  return out;
}

}  // namespace cpa
