// Acceptance suite: one line per criterion, nonzero exit if any fails.
#include "puma/ddesolve.hpp"
#include "puma/model.hpp"
#include "puma/numfmt.hpp"
#include "puma/scenarios.hpp"
#include "puma/stability.hpp"

#ifdef PUMA_HAVE_BOOST
#include <boost/numeric/odeint.hpp>
#endif

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace puma;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

ModelParams random_table_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> r(0.05, 0.2), K(200.0, 500.0), a(0.1, 0.8), g(0.1, 0.8), b(0.05, 0.1),
        N(1.0, 2.0);
    return {r(rng), K(rng), a(rng), g(rng), b(rng), N(rng), 27.0};
}

double max_norm(const State& s) { return std::max(std::abs(s.x), std::abs(s.y)); }

std::string fmt(double v, int digits = 3) { return format_fixed(v, digits); }

bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

Outcome grid_reproduction() {
    GridSpec spec = table2_grid();
    spec.step = 0.05;
    const auto start = Clock::now();
    const GridSummary s = run_grid(spec);
    const double elapsed = seconds_since(start);

    GridSpec coarse = table2_grid();
    const GridSummary d = run_grid(coarse);

    constexpr std::array<double, 3> target{72.2, 26.6, 1.4};
    Outcome out;
    std::ostringstream msg;
    for (std::size_t i = 0; i < 3; ++i) {
        const double got = s.percentage(kAllCategories[i]);
        if (std::abs(got - target[i]) > 8.0) out.pass = false;
        msg << to_string(kAllCategories[i]) << " " << fmt(got, 1) << "% (target " << fmt(target[i], 1) << "), ";
    }
    if (s.failed != 0 || elapsed >= 300.0) out.pass = false;
    msg << "failed runs " << s.failed << " at h=0.05 and " << d.failed << " at h=tau/64, " << fmt(elapsed, 1) << " s";
    out.detail = msg.str();
    return out;
}

Outcome equilibrium_correctness() {
    std::mt19937_64 rng(2024);
    const auto start = Clock::now();
    double worst = 0.0;
    int mismatches = 0;
    int with_positive = 0;
    for (int i = 0; i < 100; ++i) {
        const ModelParams p = random_table_params(rng);
        bool positive = false;
        for (const Equilibrium& e : find_equilibria(p)) {
            worst = std::max(worst, e.residual);
            positive = positive || e.kind == EquilibriumKind::Positive;
        }
        if (positive != positive_existence_condition(p)) ++mismatches;
        if (positive) ++with_positive;
    }
    const double elapsed = seconds_since(start);
    Outcome out;
    out.pass = worst <= 1e-10 && mismatches == 0 && elapsed < 10.0;
    out.detail = "max scaled residual " + format_double(worst) + ", existence mismatches " + std::to_string(mismatches) +
                 ", draws with positive equilibria " + std::to_string(with_positive) + "/100, " + fmt(elapsed, 2) + " s";
    return out;
}

std::vector<std::pair<ModelParams, Equilibrium>> positive_cases(std::uint64_t seed, std::size_t wanted) {
    std::mt19937_64 rng(seed);
    std::vector<std::pair<ModelParams, Equilibrium>> out;
    while (out.size() < wanted) {
        const ModelParams p = random_table_params(rng);
        for (const Equilibrium& e : find_equilibria(p)) {
            if (e.kind == EquilibriumKind::Positive && out.size() < wanted) out.emplace_back(p, e);
        }
    }
    return out;
}

Outcome crossing_consistency() {
    int pairs = 0;
    int bad_pairs = 0;
    int bad_p = 0;
    int bad_q = 0;
    int bad_diff = 0;
    for (const auto& [p, e] : positive_cases(77, 50)) {
        const CharCoefficients c = char_coefficients(linearize(p, e));
        for (const CrossingBranch& b : crossing_set(c, 8).branches) {
            for (double tau : b.taus) {
                ++pairs;
                const double res = std::abs(char_residual(c, {0.0, b.omega}, tau));
                if (res > 1e-8 * (1.0 + b.omega * b.omega)) ++bad_pairs;
            }
        }
        const double x = e.state.x;
        if (!rel_close(c.p, -p.beta * (p.beta - c.m), 1e-10)) ++bad_p;
        if (!rel_close(c.q, -p.beta * p.r * (1.0 - 2.0 * x / p.K), 1e-10)) ++bad_q;
        if (!(c.p - c.q > 0.0)) ++bad_diff;
    }
    Outcome out;
    out.pass = bad_pairs == 0 && bad_p == 0 && bad_q == 0 && bad_diff == 0;
    out.detail = "crossing residual violations " + std::to_string(bad_pairs) + "/" + std::to_string(pairs) +
                 "; identity violations over 50 cases: p " + std::to_string(bad_p) + ", q " + std::to_string(bad_q) +
                 ", p-q>0 " + std::to_string(bad_diff);
    return out;
}

bool stable_at(const StabilityVerdict& v, double tau) {
    if (v.status == StabilityStatus::AbsolutelyStable || v.status == StabilityStatus::GloballyStableBoundary) {
        return true;
    }
    if (v.status == StabilityStatus::Unstable) return false;
    for (const auto& w : v.stable_windows) {
        if (tau >= w.lower && tau < w.upper) return true;
    }
    return false;
}

// nullopt when the delay puts a root on the contour
std::optional<bool> oracle_stable(const CharCoefficients& c, double tau) {
    try {
        return count_unstable_roots(c, tau) == 0;
    } catch (const ContourError&) {
        return std::nullopt;
    }
}

Outcome verdict_agreement() {
    std::mt19937_64 rng(4242);
    int classified = 0;
    int checks = 0;
    int disagreements = 0;
    int conditional = 0;
    std::optional<std::pair<CharCoefficients, double>> switch_case;
    while (classified < 50) {
        const ModelParams p = random_table_params(rng);
        for (const Equilibrium& e : find_equilibria(p)) {
            if (classified >= 50) break;
            const StabilityVerdict v = classify_equilibrium(p, e, p.tau);
            if (v.status == StabilityStatus::Inconclusive || !v.coefficients) continue;
            ++classified;
            const CharCoefficients c = *v.coefficients;
            std::vector<double> taus{0.0, p.tau};
            if (v.status == StabilityStatus::ConditionallyStable) {
                ++conditional;
                if (!switch_case) switch_case.emplace(c, v.stable_windows.front().upper);
                for (const auto& w : v.stable_windows) taus.push_back(0.5 * (w.lower + w.upper));
                for (const auto& w : v.unstable_windows) {
                    taus.push_back(std::isinf(w.upper) ? 1.5 * w.lower : 0.5 * (w.lower + w.upper));
                }
            }
            for (double tau : taus) {
                const auto oracle = oracle_stable(c, tau);
                if (!oracle) continue;
                ++checks;
                if (*oracle != stable_at(v, tau)) ++disagreements;
            }
        }
    }

    Outcome out;
    std::ostringstream msg;
    msg << "disagreements " << disagreements << "/" << checks << " over " << classified << " verdicts ("
        << conditional << " conditionally stable)";
    out.pass = disagreements == 0;
    if (!switch_case) {
        out.pass = false;
        msg << "; no case-b instance found";
    } else {
        const auto& [c, tau0] = *switch_case;
        double lo = 0.0;
        double hi = 2.0 * tau0;
        while (hi - lo > 1e-8 * tau0) {
            const double mid = 0.5 * (lo + hi);
            const auto oracle = oracle_stable(c, mid);
            if (!oracle) {
                lo = hi = mid;
                break;
            }
            (*oracle ? lo : hi) = mid;
        }
        const double found = 0.5 * (lo + hi);
        const bool close = rel_close(found, tau0, 1e-4);
        out.pass = out.pass && close;
        msg << "; first switch " << format_double(tau0) << " vs oracle " << format_double(found);
    }
    out.detail = msg.str();
    return out;
}

Outcome boundary_stability() {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    int draws = 0;
    int failures = 0;
    while (draws < 20) {
        ModelParams p = random_table_params(rng);
        if (!(p.beta > p.gamma)) {
            p.gamma = 0.05 + 0.9 * u(rng) * (p.beta - 0.05);
            p.beta = std::max(p.beta, p.gamma * 1.01);
        }
        ++draws;
        const State h{1.0 + u(rng) * p.K, 0.1 + 5.0 * u(rng)};
        try {
            const State end = integrate(p, {h}, 2000.0, 0.0).terminal();
            worst = std::max(worst, max_norm(end - State{p.K, 0.0}) / p.K);
        } catch (const std::exception&) {
            ++failures;
        }
    }
    Outcome out;
    out.pass = failures == 0 && worst <= 0.01;
    out.detail = "max relative distance to (K, 0) at t=2000 " + format_double(worst) + " over 20 draws, " +
                 std::to_string(failures) + " failed runs";
    return out;
}

Outcome solver_quality() {
    ModelParams p{0.1, 200.0, 0.5, 0.5, 0.1, 2.0, 8.0};
    const State h0{60.0, 2.0};
    const double base = p.tau / 16.0;
    const State a = integrate(p, {h0}, 200.0, base).terminal();
    const State b = integrate(p, {h0}, 200.0, base / 2.0).terminal();
    const State c = integrate(p, {h0}, 200.0, base / 4.0).terminal();
    const double order = std::log2(max_norm(a - b) / max_norm(b - c));

    double worst = std::numeric_limits<double>::infinity();
#ifdef PUMA_HAVE_BOOST
    {
        const ModelParams q{0.2, 200.0, 0.8, 0.5, 0.05, 1.0, 0.0};
        const Trajectory traj = integrate(q, {{100.0, 1.0}}, 500.0, 0.01);
        using state_type = std::array<double, 2>;
        auto system = [&](const state_type& u, state_type& du, double) {
            const double f = q.gamma * u[0] * u[0] / (q.a * q.a + u[0] * u[0]);
            du[0] = q.r * (1.0 - u[0] / q.K) * u[0] - f * u[1];
            du[1] = -q.beta * u[1] + f * u[1] * std::exp(-u[1] / q.N);
        };
        namespace odeint = boost::numeric::odeint;
        auto stepper = odeint::make_dense_output(1e-12, 1e-12, odeint::runge_kutta_dopri5<state_type>());
        state_type u{100.0, 1.0};
        worst = 0.0;
        std::size_t k = 0;
        odeint::integrate_times(stepper, system, u, traj.times().begin(), traj.times().end(), 0.01,
                                [&](const state_type& v, double) {
                                    const State s = traj.states()[k++];
                                    worst = std::max({worst, std::abs(s.x - v[0]), std::abs(s.y - v[1])});
                                });
    }
#endif

    GridSpec spec = table2_grid();
    spec.step = 0.05;
    const GridSummary s = run_grid(spec);
    double min_component = std::numeric_limits<double>::infinity();
    for (const GridRun& run : s.runs) min_component = std::min(min_component, run.min_component);

    Outcome out;
    out.pass = order >= 3.5 && worst <= 1e-6 && s.failed == 0 && min_component >= -1e-9;
    out.detail = "order " + fmt(order, 2) + ", zero-delay deviation " + format_double(worst) +
                 ", grid min component " + format_double(min_component) + " with " + std::to_string(s.failed) +
                 " failed runs";
    return out;
}

Outcome scenario_reproduction() {
    Outcome out;
    std::ostringstream msg;

    const ModelParams prey_profile{0.05, 400.0, 0.5, 0.5, 0.05, 4.0, 27.0};
    const HistorySpec h{{100.0, 1.0}};
    const Trajectory base = integrate(prey_profile, h, 1000.0, 0.05);
    const Trajectory culled = run_scenario(prey_profile, {Target::Prey, 150.0, 0.5}, h, 1000.0, 0.05);
    const bool equilibrium = classify_trajectory(base) == TrajectoryCategory::PositiveEquilibrium;
    const double ratio = culled.terminal().y / base.terminal().y;
    out.pass = equilibrium && !culled.events().empty() && ratio < 0.1;
    msg << "prey removal: " << culled.events().size() << " events, predator ratio " << fmt(ratio, 4);

    const ModelParams predator_profile{0.1, 200.0, 0.5, 0.8, 0.05, 2.0, 27.0};
    for (double threshold : {3.0, 4.0}) {
        const Trajectory traj = run_scenario(predator_profile, {Target::Predator, threshold, 0.5}, h, 1000.0, 0.05);
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            if (traj.times()[i] < 500.0) continue;
            lo = std::min(lo, traj.states()[i].y);
            hi = std::max(hi, traj.states()[i].y);
        }
        const bool confined = lo >= threshold / 2.0 * 0.95 && hi <= threshold * 1.05;
        out.pass = out.pass && confined && traj.events().size() > 3;
        msg << "; predator removal at " << fmt(threshold, 0) << ": " << traj.events().size() << " events, y in ["
            << fmt(lo, 3) << ", " << fmt(hi, 3) << "]";
    }
    out.detail = msg.str();
    return out;
}

}  // namespace

int main() {
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
        {1, grid_reproduction},     {2, equilibrium_correctness}, {3, crossing_consistency},
        {4, verdict_agreement},     {5, boundary_stability},      {6, solver_quality},
        {7, scenario_reproduction},
    };
    int failed = 0;
    for (const auto& [id, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " (" << o.detail << ")" << std::endl;
    }
    std::cout << "criterion 8: N/A (figures without published parameters are not reproduced)" << std::endl;
    return failed == 0 ? 0 : 1;
}
