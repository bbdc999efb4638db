#include "puma/scenarios.hpp"

#include "puma/numfmt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace puma {

std::string to_string(TrajectoryCategory category) {
    switch (category) {
        case TrajectoryCategory::PositiveEquilibrium: return "positive_equilibrium";
        case TrajectoryCategory::PredatorExtinction: return "predator_extinction";
        case TrajectoryCategory::Oscillating: return "oscillating";
    }
    return "unknown";
}

TrajectoryCategory classify_trajectory(const Trajectory& traj, const ClassifierOptions& options) {
    const double span = traj.end_time() - traj.start_time();
    const double required = std::max(5.0 * traj.tau(), 500.0);
    if (span < required * (1.0 - 1e-12)) {
        throw std::invalid_argument("classify_trajectory: run covers " + format_double(span) +
                                    " time units, need at least " + format_double(required));
    }
    const double window_start = traj.end_time() - options.window_fraction * span;
    const auto& times = traj.times();
    const auto first = static_cast<std::size_t>(
        std::lower_bound(times.begin(), times.end(), window_start) - times.begin());
    const std::size_t nodes = times.size() - first;
    if (nodes < 10) throw std::invalid_argument("classify_trajectory: classification window has fewer than 10 nodes");

    double x_min = INFINITY, x_max = -INFINITY, y_min = INFINITY, y_max = -INFINITY;
    double x_sum = 0.0, y_sum = 0.0;
    for (std::size_t i = first; i < times.size(); ++i) {
        const State& s = traj.states()[i];
        x_min = std::min(x_min, s.x);
        x_max = std::max(x_max, s.x);
        y_min = std::min(y_min, s.y);
        y_max = std::max(y_max, s.y);
        x_sum += s.x;
        y_sum += s.y;
    }
    if (y_max < options.eps_extinct) return TrajectoryCategory::PredatorExtinction;
    const double n = static_cast<double>(nodes);
    const double x_rel = (x_max - x_min) / std::max(x_sum / n, 1e-12);
    const double y_rel = (y_max - y_min) / std::max(y_sum / n, 1e-12);
    if (x_rel > options.osc_rel || y_rel > options.osc_rel) return TrajectoryCategory::Oscillating;
    return TrajectoryCategory::PositiveEquilibrium;
}

GridSpec table2_grid() {
    GridSpec spec;
    spec.r = {0.05, 0.1, 0.2};
    spec.K = {200.0, 500.0};
    spec.a = {0.1, 0.5, 0.8};
    spec.gamma = {0.1, 0.5, 0.8};
    spec.beta = {0.05, 0.1};
    spec.N = {1.0, 2.0};
    spec.tau = 27.0;
    return spec;
}

State default_grid_history(const ModelParams& params) { return {params.K / 2.0, 1.0}; }

std::vector<ModelParams> expand_grid(const GridSpec& spec) {
    std::vector<ModelParams> out;
    out.reserve(spec.size());
    for (double r : spec.r)
        for (double K : spec.K)
            for (double a : spec.a)
                for (double gamma : spec.gamma)
                    for (double beta : spec.beta)
                        for (double N : spec.N) out.push_back({r, K, a, gamma, beta, N, spec.tau});
    return out;
}

GridSummary run_grid(const GridSpec& spec) {
    const std::vector<ModelParams> sets = expand_grid(spec);
    GridSummary summary;
    summary.runs.resize(sets.size());

    auto run_one = [&](std::size_t index) {
        GridRun& run = summary.runs[index];
        run.params = sets[index];
        try {
            const HistorySpec history{spec.history.value_or(default_grid_history(run.params))};
            const Trajectory traj = integrate(run.params, history, spec.t_end, spec.step);
            run.terminal = traj.terminal();
            run.min_component = traj.min_component();
            run.category = classify_trajectory(traj, spec.classifier);
        } catch (const IntegrationError& e) {
            run.error = std::string(e.what()) + " (last valid t = " + format_double(e.last_valid_time()) + ")";
        } catch (const std::exception& e) {
            run.error = e.what();
        }
    };

    unsigned workers = spec.threads != 0 ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(sets.size(), 1)));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < sets.size(); i = next++) run_one(i);
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }

    for (const GridRun& run : summary.runs) {
        if (run.category) {
            ++summary.counts[static_cast<std::size_t>(*run.category)];
        } else {
            ++summary.failed;
            summary.warnings.push_back("run excluded: r=" + format_double(run.params.r) + " K=" +
                                       format_double(run.params.K) + " a=" + format_double(run.params.a) +
                                       " gamma=" + format_double(run.params.gamma) + " beta=" +
                                       format_double(run.params.beta) + " N=" + format_double(run.params.N) +
                                       ": " + run.error);
        }
    }
    const std::size_t ok = summary.runs.size() - summary.failed;
    for (std::size_t i = 0; i < 3; ++i) {
        summary.percentages[i] = ok > 0 ? 100.0 * static_cast<double>(summary.counts[i]) / static_cast<double>(ok) : 0.0;
    }
    return summary;
}

Trajectory run_scenario(const ModelParams& params, const EventRule& rule, const HistorySpec& history, double t_end,
                        double step) {
    const EventRule rules[] = {rule};
    return integrate(params, history, t_end, step, rules);
}

void write_grid_runs_csv(std::ostream& os, const GridSummary& summary) {
    os << "r,K,a,gamma,beta,N,tau,category,x_end,y_end\n";
    for (const GridRun& run : summary.runs) {
        const ModelParams& p = run.params;
        os << format_double(p.r) << ',' << format_double(p.K) << ',' << format_double(p.a) << ','
           << format_double(p.gamma) << ',' << format_double(p.beta) << ',' << format_double(p.N) << ','
           << format_double(p.tau) << ',' << (run.category ? to_string(*run.category) : std::string("failed")) << ','
           << format_double(run.terminal.x) << ',' << format_double(run.terminal.y) << '\n';
    }
}

void write_grid_summary_csv(std::ostream& os, const GridSummary& summary) {
    os << "runs,failed";
    for (auto c : kAllCategories) os << ',' << to_string(c) << "_count";
    for (auto c : kAllCategories) os << ',' << to_string(c) << "_percent";
    os << '\n' << summary.runs.size() << ',' << summary.failed;
    for (auto c : kAllCategories) os << ',' << summary.count(c);
    for (auto c : kAllCategories) os << ',' << format_double(summary.percentage(c));
    os << '\n';
}

}  // namespace puma
