#pragma once

// Shared operator wire format: {"dim": d, "re": [[...]], "im": [[...]]},
// row-major nested arrays.

#include <json.hpp>

#include "qanalysis/operator_core.hpp"

namespace qa {

nlohmann::json operator_to_json(const Operator& o);
Operator operator_from_json(const nlohmann::json& j);

}  // namespace qa
