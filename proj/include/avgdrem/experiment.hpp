#pragma once

// Runs scenario/law pairs, writes the per-law trace, report and summary.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "avgdrem/config.hpp"
#include "avgdrem/diagnostics.hpp"
#include "avgdrem/simulation.hpp"

namespace avgdrem {

std::vector<RunPlan> plans_for(const ScenarioSpec& spec, LawSelection law);

/// Independent runs, distributed over OpenMP threads.
std::vector<SimulationResult> run_sweep(const std::vector<RunPlan>& plans);
std::vector<SimulationResult> run_sweep_serial(const std::vector<RunPlan>& plans);

/// Numbers derived from one trace: terminal and peak errors, excitation
/// bounds, residuals of the algebraic identities and, for plants, the
/// state-error bound.
nlohmann::json summarize(const RunPlan& plan, const SimulationResult& result, const ExcitationReport& report);

struct LawRun {
    std::string law;
    SimulationResult result;
    ExcitationReport report;
    nlohmann::json summary;
    std::filesystem::path csv_path;
    std::filesystem::path report_path;
    std::filesystem::path summary_path;
};

struct ExperimentResult {
    ScenarioSpec spec;
    std::vector<LawRun> runs;
    [[nodiscard]] bool ok() const;
};

ExperimentResult run_experiment(const ScenarioSpec& spec, LawSelection law, const std::filesystem::path& out_dir);
ExperimentResult run_experiment(const RunConfig& cfg);

double least_squares_slope(std::span<const double> x, std::span<const double> y);

/// Runs the averaging law up to t_start, resets kappa_hat to its initial
/// value there and records log|kappa_tilde| over the next `duration`
/// seconds at every step.
struct KappaProbe {
    std::vector<double> t;
    std::vector<double> log_abs_kappa_tilde;
    double kappa_tilde_start = 0.0;
    double slope = 0.0;
};
KappaProbe kappa_decay_probe(const ScenarioSpec& spec, const AveragingLaw& law, double t_start, double duration);

struct PlantBound {
    double delta_max = 0.0;
    double epsilon_x = 0.0;
    double c = 0.0;
};
/// Throws ParameterError for signal scenarios.
PlantBound plant_bound(const ScenarioSpec& spec);

}  // namespace avgdrem
