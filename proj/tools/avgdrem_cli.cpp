// avgdrem: run identification experiments, inspect traces, print bounds.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "avgdrem/config.hpp"
#include "avgdrem/diagnostics.hpp"
#include "avgdrem/experiment.hpp"

namespace {

constexpr int kExitRunFailed = 1;
constexpr int kExitBadInput = 2;

int cmd_run(const avgdrem::RunConfig& cfg) {
    const avgdrem::ExperimentResult ex = avgdrem::run_experiment(cfg);
    for (const auto& run : ex.runs) {
        std::cout << fmt::format("{} {}: {} samples -> {}\n", ex.spec.name, run.law, run.result.trace.size(),
                                 run.csv_path.string());
        if (run.result.failure) {
            std::cerr << fmt::format("error: {} {}: non-finite state in block '{}' at t = {}\n", ex.spec.name,
                                     run.law, run.result.failure->block, run.result.failure->t);
        }
    }
    return ex.ok() ? 0 : kExitRunFailed;
}

int cmd_diagnose(const std::string& path) {
    const avgdrem::Trace trace = avgdrem::read_csv(path);
    const nlohmann::json j = avgdrem::analyze_trace(trace);
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_bound(const std::string& config) {
    const avgdrem::ScenarioSpec spec = avgdrem::load_scenario(avgdrem::resolve_scenario(config));
    const avgdrem::PlantBound b = avgdrem::plant_bound(spec);
    const nlohmann::json j{{"scenario", spec.name}, {"delta_max", b.delta_max}, {"c", b.c}, {"epsilon_x", b.epsilon_x}};
    std::cout << j.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parameter identification with averaged DREM estimators"};
    app.require_subcommand(1);

    avgdrem::RunConfig cfg;
    std::string scenario;
    std::string law = "both";
    std::optional<double> gamma, l, mu, k, step, horizon, sample_every;
    std::string out = "out";
    auto* run = app.add_subcommand("run", "Simulate a scenario and write traces, reports and summaries");
    run->add_option("config", scenario, "Scenario file or bundled name (scenario_a, scenario_b, scenario_c)")->required();
    run->add_option("--law", law, "gradient | averaging | both")->check(CLI::IsMember({"gradient", "averaging", "both"}));
    run->add_option("--gamma", gamma, "Adaptation gain for the selected laws");
    run->add_option("--l", l, "Kreisselmeier forgetting rate");
    run->add_option("--mu", mu, "Finite-excitation extension gain");
    run->add_option("--k", k, "Averaging offset k_i, applied to every channel");
    run->add_option("--step", step, "Integration step");
    run->add_option("--horizon", horizon, "Simulated time");
    run->add_option("--sample-every", sample_every, "Sampling interval of the trace");
    run->add_option("--out", out, "Output directory");

    std::string trace_path;
    auto* diagnose = app.add_subcommand("diagnose", "Re-run diagnostics on an existing trace");
    diagnose->add_option("trace", trace_path, "Trace CSV")->required();

    std::string bound_config;
    auto* bound = app.add_subcommand("bound", "Print the steady-state error bound of a plant scenario");
    bound->add_option("config", bound_config, "Scenario file or bundled name")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            cfg.scenario_path = avgdrem::resolve_scenario(scenario);
            cfg.law = avgdrem::parse_law_selection(law);
            cfg.gamma = gamma;
            cfg.l = l;
            cfg.mu = mu;
            cfg.k = k;
            cfg.step = step;
            cfg.horizon = horizon;
            cfg.sample_every = sample_every;
            cfg.out_dir = out;
            return cmd_run(cfg);
        }
        if (*diagnose) return cmd_diagnose(trace_path);
        if (*bound) return cmd_bound(bound_config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    }
    return kExitBadInput;
}
