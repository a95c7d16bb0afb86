#pragma once

#include <json.hpp>

#include "tfe/params.hpp"
#include "tfe/transient.hpp"

namespace tfe::detail {

nlohmann::ordered_json params_to_json(const ProblemParams& p);
nlohmann::ordered_json step_to_json(const StepConfig& c);

/// Both throw Error(ParseError) on unknown keys or wrong types.
ProblemParams params_from_json(const nlohmann::json& j);
/// Missing keys keep their value in base.
StepConfig step_from_json(const nlohmann::json& j, StepConfig base = {});

}  // namespace tfe::detail
