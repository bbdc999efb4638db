#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "puma/scenarios.hpp"

#include <cmath>
#include <sstream>

using namespace puma;

namespace {

Trajectory constant_trajectory(State s, double t_end, double tau) {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<State> derivs;
    for (int i = 0; i <= 1000; ++i) {
        times.push_back(t_end * i / 1000.0);
        states.push_back(s);
        derivs.push_back({0.0, 0.0});
    }
    return make_trajectory(times, states, derivs, tau, {s});
}

GridSpec small_grid() {
    GridSpec g;
    g.r = {0.1};
    g.K = {200.0};
    g.a = {0.5};
    g.gamma = {0.05, 0.5};
    g.beta = {0.1};
    g.N = {2.0};
    g.step = 0.05;
    return g;
}

}  // namespace

TEST_CASE("classifier on constant trajectories") {
    CHECK(classify_trajectory(constant_trajectory({182.3, 3.2}, 1000.0, 27.0)) ==
          TrajectoryCategory::PositiveEquilibrium);
    CHECK(classify_trajectory(constant_trajectory({200.0, 0.0}, 1000.0, 27.0)) ==
          TrajectoryCategory::PredatorExtinction);
    CHECK(classify_trajectory(constant_trajectory({200.0, 5e-4}, 1000.0, 27.0)) ==
          TrajectoryCategory::PredatorExtinction);
}

TEST_CASE("classifier rejects short runs") {
    CHECK_THROWS_AS(classify_trajectory(constant_trajectory({1.0, 1.0}, 400.0, 27.0)), std::invalid_argument);
    // 5 tau exceeds 500
    CHECK_THROWS_AS(classify_trajectory(constant_trajectory({1.0, 1.0}, 600.0, 150.0)), std::invalid_argument);
    std::vector<double> times{0.0, 100.0, 1000.0};
    std::vector<State> states(3, State{1.0, 1.0});
    std::vector<State> derivs(3, State{0.0, 0.0});
    CHECK_THROWS_AS(classify_trajectory(make_trajectory(times, states, derivs, 27.0, {{1.0, 1.0}})),
                    std::invalid_argument);
}

TEST_CASE("predators vanish when mortality exceeds consumption") {
    const ModelParams p{0.1, 200.0, 0.5, 0.05, 0.1, 2.0, 27.0};
    const Trajectory traj = integrate(p, {{100.0, 1.0}}, 1000.0, 0.05);
    CHECK(classify_trajectory(traj) == TrajectoryCategory::PredatorExtinction);
    CHECK(traj.terminal().x == doctest::Approx(p.K).epsilon(0.01));
}

TEST_CASE("low prey growth at the smaller capacity oscillates") {
    const ModelParams p{0.05, 200.0, 0.5, 0.8, 0.1, 2.0, 27.0};
    const Trajectory traj = integrate(p, {default_grid_history(p)}, 1000.0, 0.05);
    CHECK(classify_trajectory(traj) == TrajectoryCategory::Oscillating);
}

TEST_CASE("grid expansion") {
    const GridSpec table = table2_grid();
    CHECK(table.size() == 216);
    const auto sets = expand_grid(table);
    REQUIRE(sets.size() == 216);
    CHECK(sets.front() == ModelParams{0.05, 200.0, 0.1, 0.1, 0.05, 1.0, 27.0});
    CHECK(sets[1] == ModelParams{0.05, 200.0, 0.1, 0.1, 0.05, 2.0, 27.0});
    CHECK(sets.back() == ModelParams{0.2, 500.0, 0.8, 0.8, 0.1, 2.0, 27.0});
    CHECK(default_grid_history(sets.back()) == State{250.0, 1.0});
}

TEST_CASE("single-run grid") {
    GridSpec g = small_grid();
    g.gamma = {0.05};
    const GridSummary s = run_grid(g);
    REQUIRE(s.runs.size() == 1);
    CHECK(s.failed == 0);
    CHECK(s.count(TrajectoryCategory::PredatorExtinction) == 1);
    CHECK(s.percentage(TrajectoryCategory::PredatorExtinction) == 100.0);
}

TEST_CASE("grid runs are deterministic and partitioned") {
    GridSpec g = small_grid();
    g.r = {0.05, 0.2};
    g.gamma = {0.05, 0.5, 0.8};
    g.threads = 3;
    const GridSummary a = run_grid(g);
    g.threads = 1;
    const GridSummary b = run_grid(g);
    REQUIRE(a.runs.size() == 6);
    std::size_t total = 0;
    for (auto c : kAllCategories) total += a.count(c);
    CHECK(total + a.failed == a.runs.size());
    double percent = 0.0;
    for (auto c : kAllCategories) percent += a.percentage(c);
    CHECK(percent == doctest::Approx(100.0));
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        CHECK(a.runs[i].params == b.runs[i].params);
        CHECK(a.runs[i].category == b.runs[i].category);
        CHECK(a.runs[i].terminal == b.runs[i].terminal);
    }
}

TEST_CASE("extinction runs under the boundary condition end near capacity") {
    GridSpec g = table2_grid();
    g.step = 0.05;
    g.gamma = {0.05, 0.1};
    g.beta = {0.1, 0.15};
    const GridSummary s = run_grid(g);
    int checked = 0;
    for (const GridRun& run : s.runs) {
        const ModelParams& p = run.params;
        const double max_response = p.gamma * p.K * p.K / (p.a * p.a + p.K * p.K);
        if (run.category != TrajectoryCategory::PredatorExtinction || !(p.beta > max_response)) continue;
        CHECK(run.terminal.x == doctest::Approx(p.K).epsilon(0.02));
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("failed runs are excluded with a warning") {
    GridSpec g = small_grid();
    g.t_end = 100.0;  // too short to classify
    const GridSummary s = run_grid(g);
    CHECK(s.failed == 2);
    CHECK(s.warnings.size() == 2);
    CHECK(s.percentage(TrajectoryCategory::PositiveEquilibrium) == 0.0);
}

TEST_CASE("removal leaves exactly the remaining fraction") {
    const ModelParams p{0.1, 200.0, 0.5, 0.8, 0.05, 2.0, 27.0};
    const Trajectory traj = run_scenario(p, {Target::Predator, 3.0, 0.3}, {{100.0, 1.0}}, 1000.0, 0.05);
    REQUIRE(traj.events().size() > 3);
    for (const EventRecord& e : traj.events()) {
        CHECK(e.value_after == 0.7 * e.value_before);
        CHECK(e.target == Target::Predator);
    }
}

TEST_CASE("prey removal starves the predator") {
    const ModelParams p{0.05, 400.0, 0.5, 0.5, 0.05, 4.0, 27.0};
    const HistorySpec h{{100.0, 1.0}};
    const Trajectory base = integrate(p, h, 1000.0, 0.05);
    const Trajectory culled = run_scenario(p, {Target::Prey, 150.0, 0.5}, h, 1000.0, 0.05);
    REQUIRE_FALSE(culled.events().empty());
    CHECK(classify_trajectory(base) == TrajectoryCategory::PositiveEquilibrium);
    CHECK(culled.terminal().y < 0.1 * base.terminal().y);
}

TEST_CASE("predator removal bounds the predator between half-threshold and threshold") {
    const ModelParams p{0.1, 200.0, 0.5, 0.8, 0.05, 2.0, 27.0};
    for (double threshold : {3.0, 4.0}) {
        const Trajectory traj = run_scenario(p, {Target::Predator, threshold, 0.5}, {{100.0, 1.0}}, 1000.0, 0.05);
        REQUIRE(traj.events().size() > 3);
        for (std::size_t i = 0; i < traj.size(); ++i) {
            if (traj.times()[i] < 500.0) continue;
            REQUIRE(traj.states()[i].y >= threshold / 2.0 * 0.95);
            REQUIRE(traj.states()[i].y <= threshold * 1.05);
        }
    }
}

TEST_CASE("grid csv output") {
    const GridSummary s = run_grid(small_grid());
    std::ostringstream runs;
    std::ostringstream summary;
    write_grid_runs_csv(runs, s);
    write_grid_summary_csv(summary, s);
    CHECK(runs.str().rfind("r,K,a,gamma,beta,N,tau,category,x_end,y_end\n", 0) == 0);
    CHECK(runs.str().find("0.1,200,0.5,0.05,0.1,2,27,predator_extinction,") != std::string::npos);
    CHECK(summary.str().find("positive_equilibrium_percent") != std::string::npos);
    CHECK(summary.str().find("\n2,0,") != std::string::npos);
}
