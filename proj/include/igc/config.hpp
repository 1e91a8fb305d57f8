#pragma once

// Scenario files: INI-style sections of `key = value` lines, '#' comments.
// Angles are written in degrees (keys ending in _deg), everything else in SI.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "igc/sim_engine.hpp"

namespace igc {

/// A `section.key=value` replacement applied on top of a parsed file.
struct ConfigOverride {
  std::string key;  // e.g. "sim.dt"
  std::string value;
};

/// Splits "section.key=value". Throws Error(Parse) on a malformed string.
ConfigOverride parse_override(std::string_view text);

struct ParsedConfig {
  ScenarioConfig config;
  std::vector<std::string> warnings;  // formation feasibility, never fatal
};

/// Parses and validates a scenario. A relative leader table path is resolved
/// against `base_dir`. Errors are Error(Parse) or Error(Config) whose guard is
/// the key path and whose message starts with the line number when known.
ParsedConfig parse_config(std::string_view text,
                          std::span<const ConfigOverride> overrides = {},
                          const std::filesystem::path& base_dir = {});

ParsedConfig load_config_file(const std::filesystem::path& path,
                              std::span<const ConfigOverride> overrides = {});

/// Every key, 17 significant digits; parse(serialize(c)) == c.
std::string serialize_config(const ScenarioConfig& config);

/// FNV-1a over serialize_config.
std::uint64_t config_hash(const ScenarioConfig& config);

/// "section.key" of every accepted key, in file order.
std::vector<std::string> config_keys();

/// Three rows per line: t_s, gamma_dot_radps, chi_dot_radps (header optional).
std::vector<TabulatedRate> parse_leader_table(std::string_view text);

}  // namespace igc
