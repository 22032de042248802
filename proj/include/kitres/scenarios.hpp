#pragma once

#include <string>
#include <vector>

#include "kitres/config.hpp"

namespace kitres {

struct ScenarioInfo {
  std::string id;
  std::string figure;       // paper-figure panel the data layout mirrors
  std::string description;  // one line
};

const std::vector<ScenarioInfo>& scenario_registry();

// Writes one or more CSV traces plus an .meta sidecar into outdir and returns
// the file paths. Unknown id -> ConfigError.
std::vector<std::string> run_scenario(const std::string& id, const Config& cfg, const std::string& outdir);

}  // namespace kitres
