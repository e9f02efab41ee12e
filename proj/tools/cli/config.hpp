#pragma once

#include "roving/model.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <string>

namespace roving::cli {

using Overrides = std::map<std::string, double>;

/// Builds a network from a config document. Any numeric field may instead
/// name an entry of the top-level "params" object; `overrides` replaces
/// params before resolution. A run artifact (with a "model" member) is
/// accepted as well. Throws Error(InvalidConfig) on schema problems.
[[nodiscard]] NetworkSpec parse_network(const nlohmann::json& doc, const Overrides& overrides = {});
[[nodiscard]] NetworkSpec load_network(const std::filesystem::path& path, const Overrides& overrides = {});

/// Fully resolved config (no params), re-ingestible by parse_network.
[[nodiscard]] nlohmann::json network_to_json(const NetworkSpec& spec);

/// Parses "key=value" into `overrides`.
void add_override(Overrides& overrides, const std::string& assignment);

}  // namespace roving::cli
