#pragma once

#include <json.hpp>
#include <string>

#include "geometry.hpp"

namespace torkos {

// Parses text into JSON, converting syntax errors into Parse failures that
// name the offending input.
nlohmann::json parse_json_text(const std::string& text, const std::string& what);

// Fan file: {"rank": n, "rays": [[...],...], "max_cones": [[i,...],...],
// "orientation": optional ±1}. Integer coordinates only.
Fan fan_from_json(const nlohmann::json& j);
nlohmann::json fan_to_json(const Fan& fan);

// Module description: {"cone": [ray indices], "flavor": "A"|"B",
// "gens": [[deg],...], "relations": [{"row", "col", "coeff", "degree"},...]}.
// Relation column degrees are reconstructed from the entries, so every
// column needs at least one entry.
Module module_from_json(const Fan& fan, const nlohmann::json& j);
nlohmann::json module_to_json(const Module& m);

// Sheaf description: {"stalks": {cone-key: module-desc,...},
// "restrictions": [{"from": [rays], "to": [rays], "matrix": [entry,...]},...]}
// with cone-key the comma-joined sorted ray indices ("" for the origin).
// Unlisted cones get zero stalks; unlisted facet pairs get zero maps.
Sheaf sheaf_from_json(const Fan& fan, const nlohmann::json& j);
nlohmann::json sheaf_to_json(const Sheaf& f);

// Line bundle description: {"divisor": [one integer per ray],
// "twist": optional character}. Distinguished from a sheaf by its keys.
bool is_bundle_json(const nlohmann::json& j);
EquivariantLineBundle bundle_from_json(const Fan& fan, const nlohmann::json& j);
nlohmann::json bundle_to_json(const EquivariantLineBundle& l);

LVec degree_from_json(const nlohmann::json& j, const std::string& what);
nlohmann::json degree_json(const LVec& v);

// Full dump of an evaluated complex: lo, dims, exact matrices (rationals as
// strings), the rank of every map, and the cohomology dimensions when the
// maps compose to zero.
nlohmann::json evaluated_json(const EvaluatedComplex& ec);

}  // namespace torkos
