#pragma once

// Batch experiments: parameter grid sweeps with trajectory classification,
// and threshold-removal scenarios.

#include "puma/ddesolve.hpp"
#include "puma/model.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace puma {

enum class TrajectoryCategory { PositiveEquilibrium, PredatorExtinction, Oscillating };

inline constexpr std::array<TrajectoryCategory, 3> kAllCategories = {
    TrajectoryCategory::PositiveEquilibrium, TrajectoryCategory::PredatorExtinction,
    TrajectoryCategory::Oscillating};

std::string to_string(TrajectoryCategory category);

struct ClassifierOptions {
    double eps_extinct = 1e-3;
    double osc_rel = 0.1;
    double window_fraction = 0.2;

    bool operator==(const ClassifierOptions&) const = default;
};

/// Classifies the behaviour over the final `window_fraction` of the run.
/// Throws std::invalid_argument if the run is shorter than max(5 tau, 500)
/// or the window holds fewer than 10 nodes.
TrajectoryCategory classify_trajectory(const Trajectory& traj, const ClassifierOptions& options = {});

struct GridSpec {
    std::vector<double> r;
    std::vector<double> K;
    std::vector<double> a;
    std::vector<double> gamma;
    std::vector<double> beta;
    std::vector<double> N;
    double tau = 27.0;
    std::optional<State> history;  // nullopt: (K/2, 1) per run
    double t_end = 1000.0;
    double step = 0.0;  // <= 0: default_step(tau)
    ClassifierOptions classifier;
    unsigned threads = 0;  // 0: hardware concurrency

    std::size_t size() const noexcept {
        return r.size() * K.size() * a.size() * gamma.size() * beta.size() * N.size();
    }

    bool operator==(const GridSpec&) const = default;
};

/// The published sweep: r in {0.05, 0.1, 0.2}, K in {200, 500},
/// a, gamma in {0.1, 0.5, 0.8}, beta in {0.05, 0.1}, N in {1, 2}, tau = 27.
GridSpec table2_grid();

/// Default grid history (K/2, 1).
State default_grid_history(const ModelParams& params);

struct GridRun {
    ModelParams params;
    std::optional<TrajectoryCategory> category;  // nullopt when the run failed
    State terminal;
    double min_component = 0.0;
    std::string error;
};

struct GridSummary {
    std::vector<GridRun> runs;  // lexicographic (r, K, a, gamma, beta, N) order
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> percentages{};  // over successful runs
    std::size_t failed = 0;
    std::vector<std::string> warnings;

    std::size_t count(TrajectoryCategory c) const { return counts[static_cast<std::size_t>(c)]; }
    double percentage(TrajectoryCategory c) const { return percentages[static_cast<std::size_t>(c)]; }
};

/// Parameter sets of the grid in run order.
std::vector<ModelParams> expand_grid(const GridSpec& spec);

GridSummary run_grid(const GridSpec& spec);

Trajectory run_scenario(const ModelParams& params, const EventRule& rule, const HistorySpec& history,
                        double t_end, double step = 0.0);

/// `r,K,a,gamma,beta,N,tau,category,x_end,y_end` (category `failed` for
/// failed runs).
void write_grid_runs_csv(std::ostream& os, const GridSummary& summary);

/// One header line and one data row with counts and percentages per category.
void write_grid_summary_csv(std::ostream& os, const GridSummary& summary);

}  // namespace puma
