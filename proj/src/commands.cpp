#include "puma/commands.hpp"

#include "puma/numfmt.hpp"
#include "puma/scenarios.hpp"
#include "puma/svg.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace puma {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class OutputDir {
public:
    explicit OutputDir(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

    std::ofstream open(const std::string& name) {
        const fs::path path = dir_ / name;
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
        written_.push_back(path.string());
        return out;
    }

    std::vector<std::string> written() const { return written_; }

private:
    fs::path dir_;
    std::vector<std::string> written_;
};

json bound(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json windows_json(const std::vector<DelayInterval>& windows) {
    json out = json::array();
    for (const auto& w : windows) out.push_back({{"lower", bound(w.lower)}, {"upper", bound(w.upper)}});
    return out;
}

void write_svg(OutputDir& out, const std::string& name, const Trajectory& traj, const RunConfig& cfg,
               const std::string& title) {
    PlotOptions options;
    options.log_prey = cfg.output.log_prey;
    options.title = title;
    out.open(name) << render_svg(traj, options);
}

void equilibria(const RunConfig& cfg, OutputDir& out, std::ostream& log) {
    const auto eqs = find_equilibria(cfg.model);
    auto csv = out.open("equilibria.csv");
    csv << "kind,x,y,residual,tangential\n";
    for (const auto& e : eqs) {
        csv << to_string(e.kind) << ',' << format_double(e.state.x) << ',' << format_double(e.state.y) << ','
            << format_double(e.residual) << ',' << (e.tangential ? "true" : "false") << '\n';
        log << to_string(e.kind) << " (" << format_double(e.state.x) << ", " << format_double(e.state.y)
            << ") residual " << format_double(e.residual) << '\n';
    }
}

void stability(const RunConfig& cfg, OutputDir& out, std::ostream& log) {
    const auto eqs = find_equilibria(cfg.model);
    std::string text;
    json records = json::array();
    for (const auto& e : eqs) {
        const StabilityVerdict v = classify_equilibrium(cfg.model, e, cfg.tau_ref(), cfg.stability.j_max);
        text += format_report(e, v);
        records.push_back(json::parse(verdict_json(e, v)));
        log << to_string(e.kind) << " (" << format_double(e.state.x) << ", " << format_double(e.state.y)
            << "): " << to_string(v.status) << '\n';
    }
    out.open("stability.txt") << text;
    out.open("stability.json") << json{{"tau_ref", cfg.tau_ref()}, {"equilibria", records}}.dump(2) << '\n';
}

void simulate(const RunConfig& cfg, OutputDir& out, std::ostream& log) {
    const Trajectory traj = integrate(cfg.model, HistorySpec{cfg.history()}, cfg.simulation.t_end, cfg.step());
    {
        auto f = out.open("trajectory.csv");
        write_trajectory_csv(f, traj);
    }
    if (cfg.output.svg) write_svg(out, "trajectory.svg", traj, cfg, "simulation");
    log << "terminal state (" << format_double(traj.terminal().x) << ", " << format_double(traj.terminal().y)
        << ") at t=" << format_double(traj.end_time()) << '\n';
}

void grid(const RunConfig& cfg, OutputDir& out, std::ostream& log) {
    if (!cfg.grid) throw std::invalid_argument("grid: configuration has no grid section");
    const GridSummary summary = run_grid(*cfg.grid);
    {
        auto f = out.open("grid_runs.csv");
        write_grid_runs_csv(f, summary);
    }
    {
        auto f = out.open("grid_summary.csv");
        write_grid_summary_csv(f, summary);
    }
    for (auto c : kAllCategories) {
        log << to_string(c) << ": " << summary.count(c) << " (" << format_fixed(summary.percentage(c), 1) << "%)\n";
    }
    for (const auto& w : summary.warnings) log << "warning: " << w << '\n';
}

void scenario(const RunConfig& cfg, OutputDir& out, std::ostream& log) {
    if (cfg.scenario.rules.empty()) throw std::invalid_argument("scenario.rules: at least one rule is required");
    const Trajectory traj =
        integrate(cfg.model, HistorySpec{cfg.history()}, cfg.simulation.t_end, cfg.step(), cfg.scenario.rules);
    {
        auto f = out.open("scenario_trajectory.csv");
        write_trajectory_csv(f, traj);
    }
    {
        auto f = out.open("scenario_events.csv");
        write_events_csv(f, traj);
    }
    if (cfg.output.svg) write_svg(out, "scenario.svg", traj, cfg, "removal scenario");
    log << traj.events().size() << " removal events; terminal state (" << format_double(traj.terminal().x) << ", "
        << format_double(traj.terminal().y) << ")\n";
}

}  // namespace

std::string to_string(Command command) {
    switch (command) {
        case Command::Equilibria: return "equilibria";
        case Command::Stability: return "stability";
        case Command::Simulate: return "simulate";
        case Command::Grid: return "grid";
        case Command::Scenario: return "scenario";
    }
    return "unknown";
}

Command command_from_string(const std::string& name) {
    for (Command c : {Command::Equilibria, Command::Stability, Command::Simulate, Command::Grid, Command::Scenario}) {
        if (to_string(c) == name) return c;
    }
    throw std::invalid_argument("unknown command '" + name + "'");
}

std::string verdict_json(const Equilibrium& eq, const StabilityVerdict& v) {
    json trail = json::array();
    for (const auto& e : v.hypothesis_trail) {
        trail.push_back({{"name", e.name}, {"holds", e.holds ? json(*e.holds) : json(nullptr)}, {"value", e.value}});
    }
    json crossings = json::array();
    for (const auto& b : v.crossings.branches) {
        crossings.push_back({{"omega", b.omega},
                             {"direction", to_string(b.direction)},
                             {"taus", b.taus},
                             {"arccos_tau0", b.arccos_tau0},
                             {"arccos_mismatch", b.arccos_mismatch}});
    }
    json record = {{"kind", to_string(eq.kind)},
                   {"x", eq.state.x},
                   {"y", eq.state.y},
                   {"residual", eq.residual},
                   {"status", to_string(v.status)},
                   {"trail", trail},
                   {"notes", v.notes},
                   {"stable_windows", windows_json(v.stable_windows)},
                   {"unstable_windows", windows_json(v.unstable_windows)},
                   {"crossings", crossings},
                   {"tau_ref", v.tau_ref}};
    if (v.coefficients) {
        const auto& c = *v.coefficients;
        record["coefficients"] = {{"m", c.m}, {"n", c.n}, {"p", c.p}, {"q", c.q}};
    }
    if (v.oracle_unstable_roots) record["oracle_unstable_roots"] = *v.oracle_unstable_roots;
    return record.dump();
}

std::vector<std::string> run_command(Command command, const RunConfig& cfg, std::ostream& log) {
    validate(cfg.model);
    OutputDir out(cfg.output.dir);
    switch (command) {
        case Command::Equilibria: equilibria(cfg, out, log); break;
        case Command::Stability: stability(cfg, out, log); break;
        case Command::Simulate: simulate(cfg, out, log); break;
        case Command::Grid: grid(cfg, out, log); break;
        case Command::Scenario: scenario(cfg, out, log); break;
    }
    return out.written();
}

int dispatch(Command command, const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    try {
        for (const auto& path : run_command(command, cfg, log)) log << "wrote " << path << '\n';
        return 0;
    } catch (const IntegrationError& e) {
        err << "error: " << e.what() << " (last valid t = " << format_double(e.last_valid_time()) << ")\n";
    } catch (const std::exception& e) {
        std::string msg = e.what();
        for (char& ch : msg) {
            if (ch == '\n') ch = ' ';
        }
        err << "error: " << msg << '\n';
    }
    return 1;
}

}  // namespace puma
