#pragma once

// Post-hoc checks on sampled traces: excitation levels, scalar regressor
// bounds, the verifiable inequality and the averaging conditions.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "avgdrem/smallmat.hpp"
#include "avgdrem/trace.hpp"

namespace avgdrem {

/// Regressor samples phi(t_k) on a time grid.
struct RegressorSamples {
    std::vector<double> t;
    std::vector<Vec> phi;

    /// Reads columns phi_1..phi_n.
    static RegressorSamples from_trace(const Trace& trace);
};

struct Window {
    double start = 0.0;
    double end = 0.0;
};

/// lambda_min of the trapezoidal Gram integral of phi phi^T over the window.
double fe_level(const RegressorSamples& s, Window w);

/// Minimum of fe_level over all windows [t_k, t_k + window_len] starting at
/// a sample. Window ends between samples are interpolated linearly.
double pe_level(const RegressorSamples& s, double window_len);
/// Same quantity, one window at a time, single-threaded.
double pe_level_serial(const RegressorSamples& s, double window_len);

/// Either a value or the time at which a precondition broke.
struct InequalityCheck {
    double eta_max = 0.0;  // 0 when the inequality fails somewhere
    std::optional<double> failed_at;
    std::string message;
    [[nodiscard]] bool ok() const { return !failed_at.has_value(); }
};

/// eta_max = inf over t >= T of (gamma D^3 + D Ddot kappa + Ddot) / D.
InequalityCheck check_inequality(std::span<const double> t, std::span<const double> delta,
                                 std::span<const double> delta_dot, std::span<const double> kappa_hat, double gamma,
                                 double from);
/// Same, with the left-hand side already evaluated per sample.
InequalityCheck check_inequality(std::span<const double> t, std::span<const double> delta,
                                 std::span<const double> lhs, double from);

struct C2Integral {
    std::vector<double> t;                    // samples with t >= from
    std::vector<std::vector<double>> running;  // |int_from^t W_i / D| per channel
    Vec sup;
    std::optional<double> failed_at;
    [[nodiscard]] bool ok() const { return !failed_at.has_value(); }
};

/// Trapezoidal running integral of W_i / D from `from` on.
C2Integral c2_integral(std::span<const double> t, std::span<const double> delta,
                       const std::vector<std::vector<double>>& scal_w, double from);

/// Earliest sample time after which delta never drops below `fraction`
/// times its minimum over the trailing `terminal_share` of the samples.
/// Empty when that minimum is not positive.
std::optional<double> t_detect(std::span<const double> t, std::span<const double> delta, double fraction = 0.9,
                               double terminal_share = 0.1);

struct ReportOptions {
    double detect_fraction = 0.9;
    double terminal_share = 0.1;
    double pe_window = 6.283185307179586;
    /// pe_level is taken over samples with t >= late_share * t_end.
    double late_share = 0.5;
};

struct ExcitationReport {
    double alpha = 0.0;
    Window window;
    double pe_alpha = 0.0;
    double pe_window = 0.0;
    Window pe_range;
    std::optional<double> T_detect;
    double delta_lb = 0.0;
    double delta_ub = 0.0;
    std::optional<double> eta_max;  // empty when the trace carries no inequality data
    std::optional<double> inequality_failed_at;
    Vec c1_bound;
    Vec c2_sup;
    std::vector<bool> c2_growing;
};

/// Runs every diagnostic on a trace with the canonical columns.
ExcitationReport analyze_trace(const Trace& trace, const ReportOptions& opt = {});

void to_json(nlohmann::json& j, const ExcitationReport& r);

}  // namespace avgdrem
