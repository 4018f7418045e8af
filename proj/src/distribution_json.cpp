#include "cpa/distribution_json.hpp"

#include <string>

#include "cpa/errors.hpp"

namespace cpa {

Json rational_to_json(const Rational& r) { return to_string(r); }

Rational rational_from_json(const Json& j) {
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw SchemaError(e.what());
    }
  }
  if (j.is_number_integer()) return Rational(j.get<long long>());
  throw SchemaError("expected a rational as a \"p/q\" string, got " + j.dump());
}

void require_keys(const Json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw SchemaError(std::string(where) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw SchemaError(std::string(where) + ": unknown field '" + key + "'");
  }
}

Json grid_to_json(const SizeGrid& grid) {
  return Json{{"step", rational_to_json(grid.step())},
              {"small_threshold", rational_to_json(grid.small_threshold())},
              {"capacity", rational_to_json(grid.capacity())},
              {"max_size", rational_to_json(grid.max_size())}};
}

SizeGrid grid_from_json(const Json& j) {
  require_keys(j, {"step", "small_threshold", "capacity", "max_size"}, "grid");
  for (const char* key : {"step", "small_threshold", "capacity"}) {
    if (!j.contains(key)) throw SchemaError(std::string("grid: missing '") + key + "'");
  }
  std::optional<Rational> max_size;
  if (j.contains("max_size")) max_size = rational_from_json(j.at("max_size"));
  try {
    return SizeGrid(rational_from_json(j.at("step")), rational_from_json(j.at("small_threshold")),
                    rational_from_json(j.at("capacity")), max_size);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("grid: ") + e.what());
  }
}

Json distribution_to_json(const Distribution& d) {
  Json mass = Json::object();
  auto m = d.mass();
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] != 0) mass[std::to_string(k)] = rational_to_json(m[k]);
  }
  Json j{{"grid", grid_to_json(d.grid())}, {"mass", mass}};
  if (d.overflow() != 0) j["overflow"] = rational_to_json(d.overflow());
  return j;
}

Distribution distribution_from_json(const Json& j) {
  require_keys(j, {"grid", "mass", "overflow"}, "distribution");
  if (!j.contains("grid") || !j.contains("mass")) throw SchemaError("distribution: needs grid and mass");
  SizeGrid grid = grid_from_json(j.at("grid"));
  const Json& mj = j.at("mass");
  if (!mj.is_object()) throw SchemaError("distribution: mass must be an object");
  std::vector<Rational> mass;
  for (const auto& [key, value] : mj.items()) {
    std::size_t pos = 0;
    unsigned long k = 0;
    try {
      k = std::stoul(key, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != key.size() || key.empty()) throw SchemaError("distribution: bad grid index '" + key + "'");
    if (k > grid.max_index()) throw SchemaError("distribution: index " + key + " outside the grid");
    if (mass.size() <= k) mass.resize(k + 1, Rational(0));
    mass[k] = rational_from_json(value);
  }
  Rational overflow = j.contains("overflow") ? rational_from_json(j.at("overflow")) : Rational(0);
  try {
    return Distribution(std::move(grid), std::move(mass), std::move(overflow));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("distribution: ") + e.what());
  }
}

}  // namespace cpa
