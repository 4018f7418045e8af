#pragma once

#include <json.hpp>

#include "cpa/distribution.hpp"

namespace cpa {

using Json = nlohmann::json;

// {"step": "1/32", "small_threshold": "1/8", "capacity": "1", "max_size": "2"}
Json grid_to_json(const SizeGrid& grid);
SizeGrid grid_from_json(const Json& j);

// {"grid": {...}, "mass": {"0": "3/10", "4": "7/10"}, "overflow": "0"}
// The overflow key is written only when nonzero.
Json distribution_to_json(const Distribution& d);
Distribution distribution_from_json(const Json& j);

Json rational_to_json(const Rational& r);
Rational rational_from_json(const Json& j);

// Throws SchemaError if j has a key outside `allowed`.
void require_keys(const Json& j, std::initializer_list<const char*> allowed, const char* where);

}  // namespace cpa
