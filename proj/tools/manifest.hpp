#pragma once

// Run manifest: every subcommand drops one of these next to its outputs so a
// run can be reproduced from the manifest alone.

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace roadmon::cli {

struct RunManifest {
  std::string subcommand;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;  // resolved key/value
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double wall_ms = 0.0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["subcommand"] = subcommand;
    j["tool_version"] = tool_version;
    j["seed"] = seed;
    nlohmann::ordered_json cfg;
    for (const auto& [k, v] : config) cfg[k] = v;
    j["config"] = cfg;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["wall_ms"] = wall_ms;
    return j;
  }
};

}  // namespace roadmon::cli
