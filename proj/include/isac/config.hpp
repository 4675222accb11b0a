#pragma once

#include <string>

#include <json.hpp>

#include "isac/detect.hpp"
#include "isac/scenario.hpp"

namespace isac {

using json = nlohmann::json;

/// Scenario documents use degrees, dBm and dB; everything is converted to
/// radians, watts and linear ratios on load. Missing fields take the
/// reference values. Unknown keys are rejected.
ScenarioConfig scenario_from_json(const json& j);
json scenario_to_json(const ScenarioConfig& cfg);
ScenarioConfig load_scenario(const std::string& path);

CfarConfig cfar_from_json(const json& j);
json cfar_to_json(const CfarConfig& cfg);

/// Throws ConfigError naming the first key of `j` not in `allowed`.
void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where);

}  // namespace isac
