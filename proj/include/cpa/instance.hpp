#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpa/block.hpp"
#include "cpa/distribution_json.hpp"
#include "cpa/eum.hpp"
#include "cpa/oracle.hpp"

namespace cpa {

inline constexpr const char* kInstanceVersion = "1";

struct RawGroup {
  std::string id;
  std::vector<RawItem> members;
};

// On-disk problem description. `knobs` holds the solver parameters other
// than the grid; parse_instance checks their names and types.
struct InstanceFile {
  std::string version = kInstanceVersion;
  std::string kind;
  std::uint64_t seed = 0;
  SizeGrid grid{Rational(1), Rational(0), Rational(1)};
  Json knobs = Json::object();
  std::vector<RawItem> items;
  std::vector<RawGroup> groups;
  std::optional<FeasibilityStructure> structure;
  std::optional<UtilityFunction> utility;
};

// Throws SchemaError on malformed input or unknown fields.
InstanceFile parse_instance(const Json& j);
Json serialize_instance(const InstanceFile& inst);

// Validates and merges `overrides` (a params object without the grid, or
// with one) into the instance parameters.
void apply_params(InstanceFile& inst, const Json& overrides);

Json raw_item_to_json(const RawItem& item);
RawItem raw_item_from_json(const Json& j);
Json structure_to_json(const FeasibilityStructure& s);
FeasibilityStructure structure_from_json(const Json& j);

// Block trees name items by pool id; children are keyed by grid index.
Json block_tree_to_json(const BlockTree& tree, std::span<const DiscretizedItem> pool);
BlockTree block_tree_from_json(const Json& j, std::span<const DiscretizedItem> pool);

// Families: grid-bernoulli, grid-uniform, two-point. Deterministic in seed.
InstanceFile generate_instance(const std::string& kind, std::size_t n, const std::string& family,
                               std::uint64_t seed);

struct ReportRow {
  std::string instance_id;
  double solver_value = 0;
  std::optional<double> oracle_value;
  std::optional<double> gap;
  Rational relaxed_capacity = 0;
  double wall_time_ms = 0;
};

std::string report_csv_header();
std::string report_csv_row(const ReportRow& row);

struct RunOptions {
  bool with_oracle = false;
  bool solver = true;
  std::size_t samples = 0;
  std::optional<std::uint64_t> seed;
  OracleBudget budget;
};

struct RunOutput {
  ReportRow row;
  Json solution;
};

RunOutput run_instance(const InstanceFile& inst, const std::string& instance_id, const RunOptions& options);

}  // namespace cpa
