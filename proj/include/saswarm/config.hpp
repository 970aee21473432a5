#pragma once

#include "saswarm/harness.hpp"

#include <string>

namespace saswarm::config {

/// Parse a scenario file (flat INI-style sections mirroring the module
/// names; physical quantities carry units in key names). Unknown keys are
/// errors. The preset key applies its bundle where it appears, so put it
/// before any per-field overrides.
harness::ScenarioConfig parse_scenario(const std::string& text);
harness::ScenarioConfig load_scenario(const std::string& path);

/// Normalized round-trip form: parse(echo(cfg)) reproduces the same run.
std::string echo_scenario(const harness::ScenarioConfig& cfg);

/// Built-in scenario for a preset (sparse|medium|dense) and swarm size.
harness::ScenarioConfig preset_scenario(const std::string& preset, int n);

}  // namespace saswarm::config
