#include "avgdrem/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "avgdrem/errors.hpp"

namespace avgdrem {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("avgdrem_test_" + name);
    fs::remove_all(d);
    return d;
}

ScenarioSpec short_a(double horizon) {
    ScenarioSpec s = load_scenario(resolve_scenario("scenario_a"));
    s.horizon = horizon;
    return s;
}

TEST(Trace, CsvRoundTrip) {
    Trace tr;
    tr.columns = {"t", "a", "b"};
    tr.rows = {{0.0, 1.0 / 3.0, std::nan("")}, {0.01, -2.5e-300, 1e17}, {0.02, M_PI, -0.0}};
    const fs::path p = fs::temp_directory_path() / "avgdrem_roundtrip.csv";
    write_csv(tr, p);
    const Trace back = read_csv(p);
    ASSERT_EQ(back.columns, tr.columns);
    ASSERT_EQ(back.size(), tr.size());
    for (std::size_t k = 0; k < tr.size(); ++k)
        for (std::size_t j = 0; j < 3; ++j) {
            if (std::isnan(tr.rows[k][j])) {
                EXPECT_TRUE(std::isnan(back.rows[k][j]));
            } else {
                EXPECT_EQ(back.rows[k][j], tr.rows[k][j]);
            }
        }
    fs::remove(p);
}

TEST(Trace, EmptyTraceIsHeaderOnly) {
    Trace tr;
    tr.columns = {"t", "x"};
    const fs::path p = fs::temp_directory_path() / "avgdrem_empty.csv";
    write_csv(tr, p);
    EXPECT_EQ(slurp(p), "t,x\n");
    EXPECT_TRUE(read_csv(p).empty());
    fs::remove(p);
}

TEST(Trace, ReadErrorsCarryLine) {
    const fs::path p = fs::temp_directory_path() / "avgdrem_bad.csv";
    {
        std::ofstream out(p);
        out << "t,x\n0,1\n0.1,oops\n";
    }
    try {
        read_csv(p);
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
    }
    {
        std::ofstream out(p);
        out << "x,t\n";
    }
    EXPECT_THROW(read_csv(p), std::runtime_error);
    EXPECT_THROW(write_csv(Trace{}, "/nonexistent_dir/x.csv"), std::runtime_error);
    fs::remove(p);
}

TEST(Trace, LookupByTime) {
    Trace tr{{"t", "x"}, {{0.0, 1.0}, {0.5, 2.0}, {1.0, 3.0}}};
    EXPECT_EQ(tr.at("x", 0.7), 2.0);
    EXPECT_EQ(tr.at("x", 1.0), 3.0);
    EXPECT_THROW((void)tr.at("x", -1.0), std::out_of_range);
    EXPECT_THROW(tr.column("y"), std::out_of_range);
}

// t, theta_hat, theta_tilde, kappa_hat, kappa_tilde, delta, delta_dot, scalW,
// ineq_lhs, ineq_rhs, delta_jacobi, phi, scalY: 2 + 2n*2 + 2 + 2 + n + 2 for n = 2.
TEST(Simulation, ScenarioAColumns) {
    const ScenarioSpec s = short_a(0.1);
    const Simulation sim({s, *s.averaging});
    const auto cols = sim.columns();
    EXPECT_EQ(cols.size(), 2u + 2 * 2 * 2 + 2 + 2 + 2 + 2);
    EXPECT_EQ(cols.front(), "t");
    EXPECT_EQ(cols[1], "theta_hat_1");
}

TEST(Simulation, ObserverColumns) {
    ScenarioSpec s = load_scenario(resolve_scenario("scenario_c"));
    s.horizon = 0.0;
    const SimulationResult r = simulate({s, *s.gradient});
    for (const char* c : {"x_1", "x_2", "xhat_1", "xhat_2", "xtilde_norm", "e_residual", "z_residual"})
        EXPECT_TRUE(r.trace.has(c)) << c;
    EXPECT_EQ(r.trace.size(), 1u);
}

TEST(Simulation, GradientLawLeavesKappaColumnsEmpty) {
    const ScenarioSpec s = short_a(0.1);
    const SimulationResult r = simulate({s, *s.gradient});
    for (double v : r.trace.column("kappa_hat")) EXPECT_TRUE(std::isnan(v));
    EXPECT_FALSE(r.trace.column("delta").empty());
}

TEST(Sweep, ParallelMatchesSerial) {
    const ScenarioSpec a = short_a(2.0);
    ScenarioSpec b = load_scenario(resolve_scenario("scenario_b"));
    b.horizon = 2.0;
    std::vector<RunPlan> plans = plans_for(a, LawSelection::both);
    for (auto& p : plans_for(b, LawSelection::both)) plans.push_back(p);
    const auto par = run_sweep(plans);
    const auto ser = run_sweep_serial(plans);
    ASSERT_EQ(par.size(), 4u);
    for (std::size_t i = 0; i < par.size(); ++i) {
        EXPECT_EQ(par[i].trace.columns, ser[i].trace.columns);
        ASSERT_EQ(par[i].trace.size(), ser[i].trace.size());
        for (std::size_t k = 0; k < par[i].trace.size(); ++k)
            for (std::size_t j = 0; j < par[i].trace.columns.size(); ++j) {
                const double x = par[i].trace.rows[k][j], y = ser[i].trace.rows[k][j];
                EXPECT_TRUE((std::isnan(x) && std::isnan(y)) || x == y);
            }
    }
}

TEST(Experiment, WritesArtifactsDeterministically) {
    const ScenarioSpec s = short_a(5.0);
    const fs::path d1 = scratch_dir("det1"), d2 = scratch_dir("det2");
    const auto r1 = run_experiment(s, LawSelection::both, d1);
    const auto r2 = run_experiment(s, LawSelection::both, d2);
    ASSERT_TRUE(r1.ok());
    ASSERT_EQ(r1.runs.size(), 2u);
    for (const char* f : {"scenario_a_gradient.csv", "scenario_a_averaging.csv", "scenario_a_gradient_report.json",
                          "scenario_a_averaging_report.json", "scenario_a_gradient_summary.json",
                          "scenario_a_averaging_summary.json"}) {
        ASSERT_TRUE(fs::exists(d1 / f)) << f;
        EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;
    }
    const auto summary = nlohmann::json::parse(slurp(d1 / "scenario_a_averaging_summary.json"));
    EXPECT_EQ(summary["status"], "ok");
    EXPECT_EQ(summary["terminal_theta_tilde"].size(), 2u);
    EXPECT_TRUE(summary["eta_max"].is_number());
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST(Experiment, ZeroHorizonSingleSample) {
    const fs::path d = scratch_dir("h0");
    const auto r = run_experiment(short_a(0.0), LawSelection::averaging, d);
    ASSERT_TRUE(r.ok());
    ASSERT_EQ(r.runs.size(), 1u);
    EXPECT_EQ(r.runs[0].result.trace.size(), 1u);
    EXPECT_TRUE(fs::exists(d / "scenario_a_averaging_summary.json"));
    fs::remove_all(d);
}

// A huge gradient gain makes RK4 unstable: the run stops, keeps the
// samples taken so far and records where it failed.
TEST(Experiment, IntegrationFailureKeepsPartialTrace) {
    ScenarioSpec s = short_a(50.0);
    s.gradient->gamma = 1e9;
    const fs::path d = scratch_dir("fail");
    const auto r = run_experiment(s, LawSelection::gradient, d);
    EXPECT_FALSE(r.ok());
    const auto& run = r.runs.front();
    ASSERT_TRUE(run.result.failure.has_value());
    EXPECT_EQ(run.result.failure->block, "theta_hat");
    EXPECT_GT(run.result.trace.size(), 1u);
    EXPECT_LT(run.result.trace.rows.back()[0], 50.0);
    const auto summary = nlohmann::json::parse(slurp(d / "scenario_a_gradient_summary.json"));
    EXPECT_EQ(summary["status"], "failed");
    EXPECT_EQ(summary["failure"]["block"], "theta_hat");
    fs::remove_all(d);
}

// Full-length paired comparison: averaging beats gradient on channel 2.
TEST(Experiment, PairedComparisonScenarioA) {
    const ScenarioSpec s = load_scenario(resolve_scenario("scenario_a"));
    const auto res = run_sweep(plans_for(s, LawSelection::both));
    const double grad = std::abs(res[0].trace.rows.back()[res[0].trace.index("theta_tilde_2")]);
    const double avg = std::abs(res[1].trace.rows.back()[res[1].trace.index("theta_tilde_2")]);
    EXPECT_LT(avg, grad);
}

TEST(Experiment, SlopeAndBound) {
    const std::vector<double> x{0, 1, 2, 3}, y{1, -1, -3, -5};
    EXPECT_DOUBLE_EQ(least_squares_slope(x, y), -2.0);
    EXPECT_THROW(least_squares_slope(std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 1.0}), ParameterError);
    EXPECT_THROW(plant_bound(short_a(1.0)), ParameterError);
    const PlantBound b = plant_bound(load_scenario(resolve_scenario("scenario_c")));
    EXPECT_DOUBLE_EQ(b.delta_max, 6.2);
    EXPECT_GT(b.epsilon_x, 0.0);
}

TEST(Experiment, KappaProbeDecays) {
    const ScenarioSpec s = short_a(10.0);
    const KappaProbe p = kappa_decay_probe(s, *s.averaging, 4.0, 0.05);
    EXPECT_LT(p.kappa_tilde_start, 0.0);
    EXPECT_LT(p.slope, -50.0);
}

}  // namespace
}  // namespace avgdrem
