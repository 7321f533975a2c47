#pragma once

// JSON distribution specs:
//   {"kind": "exponential", "params": {"lambda": 1}}
//   {"kind": "mixture", "mixture": [{"weight": 0.5, "spec": {...}}, ...]}
//   {"kind": "product", "components": [{...}, {...}]}
//   {"kind": "blm", "params": {"theta": 3}, "components": [F, G]}
// Unknown fields and parameters are rejected; errors carry the JSON path.

#include <string>

#include "json.hpp"
#include "stieltjes/catalog.hpp"

namespace stieltjes {

AnyDistribution parse_spec(const nlohmann::json& doc, const std::string& path = "$");

/// Accepts inline JSON text.
AnyDistribution parse_spec_text(const std::string& text);

nlohmann::ordered_json to_json(const Distribution1D& dist);
nlohmann::ordered_json to_json(const JointDist& dist);
nlohmann::ordered_json to_json(const AnyDistribution& dist);

}  // namespace stieltjes
