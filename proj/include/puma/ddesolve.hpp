#pragma once

// Fixed-step method-of-steps integrator for the two-component delayed system.
//
// Steps are classic RK4 with h = tau / s, so every multiple of tau is a grid
// node and the delayed argument of every stage lies in completed history.
// Delayed values are read from the cubic Hermite interpolant of the stored
// nodes. Threshold rules remove a fraction of one population the moment it
// crosses the threshold from below.

#include "puma/model.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace puma {

/// Constant initial history phi(t) = value on [-tau, 0].
struct HistorySpec {
    State value;

    bool operator==(const HistorySpec&) const = default;
};

enum class Target { Prey, Predator };

std::string to_string(Target target);
Target target_from_string(const std::string& name);

/// Removes `fraction_removed` of the target population on every upward
/// crossing of `threshold`.
struct EventRule {
    Target target = Target::Prey;
    double threshold = 1.0;
    double fraction_removed = 0.5;

    bool operator==(const EventRule&) const = default;
};

void validate(const EventRule& rule);

struct EventRecord {
    double time = 0.0;
    Target target = Target::Prey;
    double value_before = 0.0;
    double value_after = 0.0;
};

/// Raised when the solution leaves the admissible set. Carries the last time
/// at which the state was valid.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double last_valid_time)
        : std::runtime_error(what), last_valid_time_(last_valid_time) {}

    double last_valid_time() const noexcept { return last_valid_time_; }

private:
    double last_valid_time_;
};

/// Autonomous delayed right-hand side f(u(t), u(t - tau)).
using DelayedRhs = std::function<State(const State& current, const State& delayed)>;

struct IntegrationOptions {
    double t_end = 1000.0;
    double step = 0.0;  // requested step; <= 0 selects default_step(tau)
    bool enforce_non_negative = true;
};

/// Dense piecewise-cubic solution. Nodes may share a time: an event stores
/// the pre-jump and post-jump states, and a delayed-term breakpoint stores
/// the left and right derivatives.
class Trajectory {
public:
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<State>& states() const noexcept { return states_; }
    const std::vector<State>& derivatives() const noexcept { return derivatives_; }
    const std::vector<EventRecord>& events() const noexcept { return events_; }

    double tau() const noexcept { return tau_; }
    double step() const noexcept { return step_; }
    const HistorySpec& history() const noexcept { return history_; }
    double start_time() const noexcept { return times_.front(); }
    double end_time() const noexcept { return times_.back(); }
    const State& terminal() const noexcept { return states_.back(); }

    // Components in (-1e-9, 0) clamped to zero during integration.
    std::size_t clamp_count() const noexcept { return clamp_count_; }
    // Smallest component seen before clamping.
    double min_component() const noexcept { return min_component_; }

    std::size_t size() const noexcept { return times_.size(); }

private:
    friend class Integrator;
    friend Trajectory make_trajectory(std::vector<double>, std::vector<State>, std::vector<State>,
                                      double, HistorySpec);

    std::vector<double> times_;
    std::vector<State> states_;
    std::vector<State> derivatives_;
    std::vector<EventRecord> events_;
    double tau_ = 0.0;
    double step_ = 0.0;
    HistorySpec history_;
    std::size_t clamp_count_ = 0;
    double min_component_ = 0.0;
};

/// Builds a trajectory from explicit nodes (for tests and deserialisation).
/// Times must be non-decreasing and all three vectors the same length.
Trajectory make_trajectory(std::vector<double> times, std::vector<State> states,
                           std::vector<State> derivatives, double tau, HistorySpec history);

/// tau / 64 when tau > 0, otherwise 0.1.
double default_step(double tau);

/// Largest tau / s (s integer) not exceeding `requested`; `requested` itself
/// when tau == 0.
double effective_step(double tau, double requested);

/// Integrates the model from t = 0 to t_end.
Trajectory integrate(const ModelParams& params, const HistorySpec& history, double t_end, double step,
                     std::span<const EventRule> rules = {});

/// Integrates an arbitrary autonomous two-component delayed system.
Trajectory integrate(const DelayedRhs& f, double tau, const HistorySpec& history,
                     const IntegrationOptions& options, std::span<const EventRule> rules = {});

/// Cubic Hermite evaluation; history value for t < start. At an event time
/// the post-jump state is returned. Throws std::domain_error outside
/// [start - tau, end].
State dense_eval(const Trajectory& traj, double t);

/// `t,x,y` with one row per stored node.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// `t,target,before,after` with one row per event.
void write_events_csv(std::ostream& os, const Trajectory& traj);

}  // namespace puma
