#pragma once

// The five analysis commands of the command-line tool. Each writes its
// declared files into the output directory and a short summary to `log`.

#include "puma/config.hpp"
#include "puma/stability.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace puma {

enum class Command { Equilibria, Stability, Simulate, Grid, Scenario };

std::string to_string(Command command);

/// Throws std::invalid_argument for unknown names.
Command command_from_string(const std::string& name);

/// Runs `command` and returns the paths written. Module errors propagate.
std::vector<std::string> run_command(Command command, const RunConfig& config, std::ostream& log);

/// run_command with error capture: 0 on success, 1 with a one-line message
/// on `err` otherwise.
int dispatch(Command command, const RunConfig& config, std::ostream& log, std::ostream& err);

/// Machine-readable verdict record (JSON object).
std::string verdict_json(const Equilibrium& eq, const StabilityVerdict& verdict);

}  // namespace puma
