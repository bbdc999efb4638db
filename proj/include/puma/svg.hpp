#pragma once

#include "puma/ddesolve.hpp"

#include <string>
#include <vector>

namespace puma {

struct PlotOptions {
    bool log_prey = false;
    int width = 900;
    int height = 640;
    std::string title = "prey-predator trajectory";
};

/// Two stacked panels (prey on top, predator below) sharing the time axis,
/// one polyline per series, a legend, and one dashed marker per event.
/// Byte-deterministic for a given input. Throws std::invalid_argument for
/// trajectories with fewer than two nodes.
std::string render_svg(const Trajectory& traj, const PlotOptions& options = {});

/// Powers of ten inside [lo, hi] (lo > 0).
std::vector<double> decade_ticks(double lo, double hi);

/// Round-number ticks covering [lo, hi] with roughly `target` intervals.
std::vector<double> linear_ticks(double lo, double hi, int target = 5);

}  // namespace puma
