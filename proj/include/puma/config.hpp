#pragma once

// Run configuration: a JSON document with sections `model`, `simulation`,
// `stability`, `scenario`, `grid`, and `output`. Unknown keys are rejected.
//
//   {
//     "model":      {"r": 0.1, "K": 200, "a": 0.5, "gamma": 0.5, "beta": 0.1, "N": 2, "tau": 27},
//     "simulation": {"history": {"x": 100, "y": 1}, "t_end": 1000, "step": 0.421875},
//     "stability":  {"tau_ref": 27, "j_max": 8},
//     "scenario":   {"rules": [{"target": "prey", "threshold": 150, "fraction": 0.5}]},
//     "grid":       {"r": [...], "K": [...], "a": [...], "gamma": [...], "beta": [...], "N": [...],
//                    "tau": 27, "t_end": 1000, "step": 0.421875, "history": {"x": 100, "y": 1},
//                    "eps_extinct": 0.001, "osc_rel": 0.1, "threads": 0},
//     "output":     {"dir": "out", "svg": true, "log_prey": true}
//   }
//
// Only `model` is required; its seven fields are all required.

#include "puma/ddesolve.hpp"
#include "puma/model.hpp"
#include "puma/scenarios.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace puma {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimulationConfig {
    std::optional<State> history;  // nullopt: (K/2, 1)
    double t_end = 1000.0;
    std::optional<double> step;    // nullopt: default_step(tau)

    bool operator==(const SimulationConfig&) const = default;
};

struct StabilityConfig {
    std::optional<double> tau_ref;  // nullopt: model tau
    int j_max = 8;

    bool operator==(const StabilityConfig&) const = default;
};

struct ScenarioConfig {
    std::vector<EventRule> rules;

    bool operator==(const ScenarioConfig&) const = default;
};

struct OutputConfig {
    std::string dir = ".";
    bool svg = false;
    bool log_prey = false;

    bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
    ModelParams model;
    SimulationConfig simulation;
    StabilityConfig stability;
    ScenarioConfig scenario;
    std::optional<GridSpec> grid;
    OutputConfig output;

    bool operator==(const RunConfig&) const = default;

    State history() const { return simulation.history.value_or(State{model.K / 2.0, 1.0}); }
    double step() const { return simulation.step.value_or(default_step(model.tau)); }
    double tau_ref() const { return stability.tau_ref.value_or(model.tau); }
};

/// Parses and validates a configuration document. Errors name the key path
/// and the violated constraint.
RunConfig parse_config(std::string_view text);

/// Reads and parses a file.
RunConfig load_config(const std::string& path);

/// Inverse of parse_config (explicit values for every optional field set).
std::string serialize_config(const RunConfig& config);

}  // namespace puma
