#pragma once

#include <string>
#include <vector>

#include "reflectlab/report.hpp"

namespace reflectlab::cli {

struct ParamSpec {
  std::string name;
  ParamValue default_value;
  std::string help;
};

struct ScenarioInfo {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> schema;
};

const std::vector<ScenarioInfo>& scenarios();
const ScenarioInfo& scenario_info(const std::string& name);  // throws ConfigError

/// Fills defaults and checks names and types against the schema.
ScenarioConfig validate(const ScenarioConfig& config);

/// Runs the scenario pipeline. Throws ConfigError for schema problems and
/// ScenarioError wrapping module errors.
Report run(const ScenarioConfig& config);

}  // namespace reflectlab::cli
