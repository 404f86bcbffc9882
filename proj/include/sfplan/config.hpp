#pragma once

// Application configuration: one structured file (key-value text or JSON)
// covering the radio, default environment, region, score weights, simulator
// and dynamic-baseline settings. Every field has a working default, so an
// empty file (or none at all) is runnable.

#include <cstdint>
#include <optional>
#include <string>

#include "sfplan/linksim.hpp"
#include "sfplan/scenarios.hpp"
#include "sfplan/selector.hpp"

namespace sfplan {

struct SimulatorConfig {
    int n_packets = 1000;
    std::optional<double> shadowing_sigma_override_db;
};

struct AppConfig {
    RadioConfig radio;
    EnvironmentModel environment;  // default environment for inline scenarios
    RegionProfile region;
    ScoreWeights weights;
    SelectorOptions selector;
    SimulatorConfig simulator;
    DynamicProtocolConfig dynamic;
    ScenarioGrid grid = default_grid();
    std::uint64_t seed = 43301;

    void validate() const;
};

/// Loads a config file. JSON when the first non-space character is '{',
/// otherwise `section.key = value` lines with '#' comments. Unknown keys
/// are rejected.
AppConfig load_app_config(const std::string& path);

/// Seed resolution order: explicit CLI value, then the SFPLAN_SEED
/// environment variable, then the config file value.
std::uint64_t resolve_seed(const AppConfig& config, std::optional<std::uint64_t> cli_seed);

}  // namespace sfplan
