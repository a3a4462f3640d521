#pragma once

// Couples the regression source (synthetic signals or the observer plant),
// the extension filters, mixing and one identification law into a single
// ODE integrated with fixed-step RK4.

#include <optional>
#include <string>
#include <variant>

#include "avgdrem/estimators.hpp"
#include "avgdrem/integrator.hpp"
#include "avgdrem/observer.hpp"
#include "avgdrem/trace.hpp"

namespace avgdrem {

struct BoundSettings {
    Mat q;
    double c = 0.0;
};

struct ScenarioSpec {
    std::string name;
    std::variant<RegressionProblem, PlantSpec> source;
    ExtensionScheme extension;
    std::optional<GradientLaw> gradient;
    std::optional<AveragingLaw> averaging;
    double horizon = 0.0;
    double step = 1e-3;
    double sample_every = 1e-2;
    /// Observer scenarios only; defaults to Q = I, c = lambda_min(Q) / 2.
    std::optional<BoundSettings> bound;

    [[nodiscard]] bool is_observer() const { return std::holds_alternative<PlantSpec>(source); }
    /// Dimension of the regression (n for signal scenarios, q for plants).
    [[nodiscard]] std::size_t regression_dim() const;
    /// Ground-truth parameters of the regression.
    [[nodiscard]] const Vec& theta() const;
};

/// Throws ParameterError naming the offending field.
void validate(const ScenarioSpec& spec);

struct RunPlan {
    ScenarioSpec scenario;
    LawSpec law;
};

struct SimulationResult {
    Trace trace;
    std::optional<StepFailure> failure;
    SystemState final_state;
};

class Simulation {
public:
    explicit Simulation(RunPlan plan);

    [[nodiscard]] const RunPlan& plan() const noexcept { return plan_; }
    [[nodiscard]] const StateLayout& layout() const noexcept { return layout_; }
    [[nodiscard]] SystemState initial_state() const;

    void rhs(double t, std::span<const double> s, std::span<double> ds) const;

    [[nodiscard]] std::vector<std::string> columns() const;
    [[nodiscard]] std::vector<double> sample(double t, std::span<const double> s) const;

    [[nodiscard]] SimulationResult run() const;
    /// Integrates from an arbitrary state s at time t0 for `duration` seconds.
    [[nodiscard]] SimulationResult run_segment(SystemState s, double t0, double duration,
                                               double sample_every) const;

    /// Everything the right-hand side computes at (t, s).
    struct Snapshot {
        Vec phi;
        double y = 0.0;
        double w = 0.0;
        ExtensionState ext;
        ExtensionState ext_dot;
        MixedSignals mixed;
        EstimatorState est;
        EstimatorState est_dot;
        std::optional<ObserverState> obs;
        std::optional<ObserverState> obs_dot;
    };
    [[nodiscard]] Snapshot evaluate(double t, std::span<const double> s) const;

private:
    RunPlan plan_;
    std::size_t n_ = 0;   // regression dimension
    std::size_t nx_ = 0;  // plant state dimension, 0 for signal scenarios
    StateLayout layout_;
};

/// Convenience: Simulation(plan).run().
SimulationResult simulate(const RunPlan& plan);

}  // namespace avgdrem
