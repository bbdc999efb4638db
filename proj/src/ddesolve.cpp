#include "puma/ddesolve.hpp"

#include "puma/numfmt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

namespace puma {

namespace {

constexpr double kClampTolerance = 1e-9;

enum class Side { Left, Right };

State hermite(double t0, const State& y0, const State& d0, double t1, const State& y1, const State& d1,
              double t) {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return {h00 * y0.x + h10 * h * d0.x + h01 * y1.x + h11 * h * d1.x,
            h00 * y0.y + h10 * h * d0.y + h01 * y1.y + h11 * h * d1.y};
}

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

double component(const State& s, Target target) { return target == Target::Prey ? s.x : s.y; }

void scale_component(State& s, Target target, double factor) {
    if (target == Target::Prey) {
        s.x *= factor;
    } else {
        s.y *= factor;
    }
}

// Evaluates stored nodes at t. `side` selects the left or right limit at
// times carrying duplicate nodes.
State evaluate(const std::vector<double>& times, const std::vector<State>& states,
               const std::vector<State>& derivs, const HistorySpec& history, double t, Side side) {
    if (times.empty() || (t < times.front() && !same_time(t, times.front()))) return history.value;
    if (side == Side::Right) {
        auto it = std::upper_bound(times.begin(), times.end(), t);
        std::size_t i = static_cast<std::size_t>(it - times.begin());
        if (i > 0) --i;
        // snap to a node a hair to the right
        if (i + 1 < times.size() && same_time(times[i + 1], t)) {
            ++i;
            while (i + 1 < times.size() && times[i + 1] == times[i]) ++i;
        }
        if (same_time(times[i], t) || i + 1 == times.size()) return states[i];
        return hermite(times[i], states[i], derivs[i], times[i + 1], states[i + 1], derivs[i + 1], t);
    }
    auto it = std::lower_bound(times.begin(), times.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times.begin());
    if (i == times.size()) return states.back();
    if (i > 0 && same_time(times[i - 1], t)) {
        --i;
        while (i > 0 && times[i - 1] == times[i]) --i;
    }
    if (same_time(times[i], t) || i == 0) return states[i];
    return hermite(times[i - 1], states[i - 1], derivs[i - 1], times[i], states[i], derivs[i], t);
}

}  // namespace

std::string to_string(Target target) { return target == Target::Prey ? "prey" : "predator"; }

Target target_from_string(const std::string& name) {
    if (name == "prey") return Target::Prey;
    if (name == "predator") return Target::Predator;
    throw std::invalid_argument("unknown event target '" + name + "' (expected prey or predator)");
}

void validate(const EventRule& rule) {
    if (!std::isfinite(rule.threshold) || !(rule.threshold > 0.0)) {
        throw std::invalid_argument("EventRule.threshold must be finite and > 0");
    }
    if (!(rule.fraction_removed > 0.0 && rule.fraction_removed < 1.0)) {
        throw std::invalid_argument("EventRule.fraction_removed must lie in (0, 1)");
    }
}

double default_step(double tau) { return tau > 0.0 ? tau / 64.0 : 0.1; }

double effective_step(double tau, double requested) {
    if (!std::isfinite(requested) || !(requested > 0.0)) {
        throw std::invalid_argument("integration step must be finite and > 0");
    }
    if (tau <= 0.0) return requested;
    const double s = std::max(1.0, std::ceil(tau / requested - 1e-12));
    return tau / s;
}

Trajectory make_trajectory(std::vector<double> times, std::vector<State> states, std::vector<State> derivatives,
                           double tau, HistorySpec history) {
    if (times.empty() || times.size() != states.size() || times.size() != derivatives.size()) {
        throw std::invalid_argument("make_trajectory: node vectors must be non-empty and equally sized");
    }
    if (!std::is_sorted(times.begin(), times.end())) {
        throw std::invalid_argument("make_trajectory: times must be non-decreasing");
    }
    Trajectory traj;
    traj.times_ = std::move(times);
    traj.states_ = std::move(states);
    traj.derivatives_ = std::move(derivatives);
    traj.tau_ = tau;
    traj.history_ = history;
    traj.step_ = traj.times_.size() > 1 ? traj.times_[1] - traj.times_[0] : 0.0;
    double lowest = std::numeric_limits<double>::infinity();
    for (const State& s : traj.states_) lowest = std::min({lowest, s.x, s.y});
    traj.min_component_ = lowest;
    return traj;
}

class Integrator {
public:
    Integrator(const DelayedRhs& f, double tau, const HistorySpec& history, const IntegrationOptions& options,
               std::span<const EventRule> rules)
        : f_(f), tau_(tau), options_(options), rules_(rules.begin(), rules.end()) {
        if (!std::isfinite(tau) || tau < 0.0) throw std::invalid_argument("tau must be finite and >= 0");
        if (!std::isfinite(options.t_end) || !(options.t_end > 0.0)) {
            throw std::invalid_argument("t_end must be finite and > 0");
        }
        if (options.enforce_non_negative && (!(history.value.x >= 0.0) || !(history.value.y >= 0.0))) {
            throw std::invalid_argument("history must be non-negative");
        }
        if (!std::isfinite(history.value.x) || !std::isfinite(history.value.y)) {
            throw std::invalid_argument("history must be finite");
        }
        for (const EventRule& rule : rules_) validate(rule);
        traj_.tau_ = tau;
        traj_.history_ = history;
        traj_.step_ = effective_step(tau, options.step > 0.0 ? options.step : default_step(tau));
        traj_.min_component_ = std::min(history.value.x, history.value.y);
        for (const EventRule& rule : rules_) {
            armed_.push_back(component(history.value, rule.target) < rule.threshold);
        }
    }

    Trajectory run() {
        const double h = traj_.step_;
        const double t_end = options_.t_end;
        const auto n_steps = static_cast<long long>(std::ceil(t_end / h - 1e-9));
        auto grid_time = [&](long long k) { return k >= n_steps ? t_end : static_cast<double>(k) * h; };

        double t = 0.0;
        State u = traj_.history_.value;
        push(t, u, derivative(t, u, Side::Right));

        long long k = 0;
        while (k < n_steps) {
            double target = grid_time(k + 1);
            bool at_grid = true;
            auto bp = breakpoints_.upper_bound(t);
            while (bp != breakpoints_.end() && same_time(*bp, t)) ++bp;
            if (bp != breakpoints_.end() && *bp < target && !same_time(*bp, target)) {
                target = *bp;
                at_grid = false;
            }

            const State d_start = derivative(t, u, Side::Right);
            if (!(d_start == traj_.derivatives_.back())) push(t, u, d_start);

            State next = rk4(t, u, d_start, target - t);
            check(next, t);
            const State d_end = derivative(target, next, Side::Left);

            const auto crossing = find_crossing(t, u, d_start, target, next, d_end);
            if (crossing) {
                const auto [rule_index, t_event] = *crossing;
                const EventRule& rule = rules_[rule_index];
                State pre = hermite(t, u, d_start, target, next, d_end, t_event);
                check(pre, t);
                push(t_event, pre, derivative(t_event, pre, Side::Left));
                armed_[rule_index] = false;
                State post = pre;
                scale_component(post, rule.target, 1.0 - rule.fraction_removed);
                traj_.events_.push_back(
                    {t_event, rule.target, component(pre, rule.target), component(post, rule.target)});
                if (tau_ > 0.0 && t_event + tau_ < t_end) breakpoints_.insert(t_event + tau_);
                t = t_event;
                u = post;
                push(t, u, derivative(t, u, Side::Right));
                rearm(u);
                continue;
            }

            push(target, next, d_end);
            t = target;
            u = next;
            rearm(u);
            if (at_grid) ++k;
        }
        return std::move(traj_);
    }

private:
    State delayed(double t_stage, const State& stage, Side side) const {
        if (tau_ == 0.0) return stage;
        return evaluate(traj_.times_, traj_.states_, traj_.derivatives_, traj_.history_, t_stage - tau_, side);
    }

    State derivative(double t, const State& u, Side side) const { return f_(u, delayed(t, u, side)); }

    State rk4(double t, const State& u, const State& k1, double dt) const {
        const State y2 = u + (0.5 * dt) * k1;
        const State k2 = f_(y2, delayed(t + 0.5 * dt, y2, Side::Right));
        const State y3 = u + (0.5 * dt) * k2;
        const State k3 = f_(y3, delayed(t + 0.5 * dt, y3, Side::Right));
        const State y4 = u + dt * k3;
        const State k4 = f_(y4, delayed(t + dt, y4, Side::Left));
        return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    void check(State& s, double last_valid) {
        if (!std::isfinite(s.x) || !std::isfinite(s.y)) {
            throw IntegrationError("non-finite state after t = " + format_double(last_valid), last_valid);
        }
        if (!options_.enforce_non_negative) return;
        traj_.min_component_ = std::min({traj_.min_component_, s.x, s.y});
        for (double* c : {&s.x, &s.y}) {
            if (*c >= 0.0) continue;
            if (*c < -kClampTolerance) {
                throw IntegrationError("negative component " + format_double(*c) + " after t = " +
                                           format_double(last_valid),
                                       last_valid);
            }
            *c = 0.0;
            ++traj_.clamp_count_;
        }
    }

    void push(double t, const State& u, const State& d) {
        traj_.times_.push_back(t);
        traj_.states_.push_back(u);
        traj_.derivatives_.push_back(d);
    }

    void rearm(const State& u) {
        for (std::size_t i = 0; i < rules_.size(); ++i) {
            if (component(u, rules_[i].target) < rules_[i].threshold) armed_[i] = true;
        }
    }

    // Earliest upward threshold crossing on the step, located by bisection
    // on the Hermite interpolant.
    std::optional<std::pair<std::size_t, double>> find_crossing(double t0, const State& u0, const State& d0,
                                                                double t1, const State& u1,
                                                                const State& d1) const {
        const double tol = tau_ > 0.0 ? 1e-10 * tau_ : 1e-10;
        std::optional<std::pair<std::size_t, double>> best;
        for (std::size_t i = 0; i < rules_.size(); ++i) {
            if (!armed_[i]) continue;
            const EventRule& rule = rules_[i];
            auto value = [&](double t) {
                return component(hermite(t0, u0, d0, t1, u1, d1, t), rule.target) - rule.threshold;
            };
            if (!(component(u0, rule.target) < rule.threshold)) continue;
            double lo = t0;
            double hi = t1;
            bool found = false;
            constexpr int kProbes = 4;
            for (int p = 1; p <= kProbes; ++p) {
                const double tp = p == kProbes ? t1 : t0 + (t1 - t0) * p / kProbes;
                const double v = p == kProbes ? component(u1, rule.target) - rule.threshold : value(tp);
                if (v >= 0.0) {
                    hi = tp;
                    found = true;
                    break;
                }
                lo = tp;
            }
            if (!found) continue;
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                if (value(mid) >= 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            if (!best || hi < best->second) best = std::make_pair(i, hi);
        }
        return best;
    }

    DelayedRhs f_;
    double tau_;
    IntegrationOptions options_;
    std::vector<EventRule> rules_;
    std::vector<bool> armed_;
    std::set<double> breakpoints_;
    Trajectory traj_;
};

Trajectory integrate(const DelayedRhs& f, double tau, const HistorySpec& history, const IntegrationOptions& options,
                     std::span<const EventRule> rules) {
    return Integrator(f, tau, history, options, rules).run();
}

Trajectory integrate(const ModelParams& params, const HistorySpec& history, double t_end, double step,
                     std::span<const EventRule> rules) {
    validate(params);
    const ModelParams p = params;
    DelayedRhs f = [p](const State& current, const State& delayed) { return rhs_unchecked(current, delayed, p); };
    IntegrationOptions options;
    options.t_end = t_end;
    options.step = step;
    return integrate(f, params.tau, history, options, rules);
}

State dense_eval(const Trajectory& traj, double t) {
    if (!std::isfinite(t) || t < traj.start_time() - traj.tau() ||
        (t > traj.end_time() && !same_time(t, traj.end_time()))) {
        throw std::domain_error("dense_eval: t = " + format_double(t) + " outside [" +
                                format_double(traj.start_time() - traj.tau()) + ", " +
                                format_double(traj.end_time()) + "]");
    }
    return evaluate(traj.times(), traj.states(), traj.derivatives(), traj.history(), t, Side::Right);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,x,y\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        os << format_double(traj.times()[i]) << ',' << format_double(traj.states()[i].x) << ','
           << format_double(traj.states()[i].y) << '\n';
    }
}

void write_events_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,target,before,after\n";
    for (const EventRecord& e : traj.events()) {
        os << format_double(e.time) << ',' << to_string(e.target) << ',' << format_double(e.value_before) << ','
           << format_double(e.value_after) << '\n';
    }
}

}  // namespace puma
