#pragma once

// Identification laws driven by the mixed scalar regressions.
//
// Gradient:  d/dt theta_hat = -gamma delta (delta theta_hat - scalY)
// Averaging: d/dt theta_hat_i = -(theta_hat_i - kappa_hat scalY_i) / (t + k_i)
//            d/dt kappa_hat   = -gamma delta (delta kappa_hat - 1) - delta_dot kappa_hat^2
//
// kappa_hat tracks 1/delta; the growing denominator t + k_i averages out
// disturbances whose delta^{-1}-weighted primitive stays bounded. None of
// these functions see the true parameters.

#include <variant>

#include "avgdrem/mixing.hpp"

namespace avgdrem {

struct GradientLaw {
    double gamma = 1.0;
    Vec theta0;
};

struct AveragingLaw {
    double gamma = 1.0;
    Vec k;
    double kappa0 = 0.0;
    Vec theta0;
    /// Reference decay rate for the inequality overlay column (eta * delta).
    double eta_reference = 0.0;
};

using LawSpec = std::variant<GradientLaw, AveragingLaw>;

struct EstimatorState {
    Vec theta_hat;
    double kappa_hat = 0.0;
    /// Time elapsed since t0; F_i = t + k_i.
    double t = 0.0;
};

/// Throws ParameterError on gamma <= 0, any k_i <= 0 or length mismatch.
void validate(const LawSpec& law, std::size_t n);

EstimatorState initial_estimator_state(const LawSpec& law, std::size_t n);

EstimatorState gradient_rhs(const EstimatorState& s, const MixedSignals& mixed, double gamma);

double kappa_rhs(double kappa_hat, const MixedSignals& mixed, double gamma);

/// Derivative of (theta_hat, kappa_hat); the returned t field is dt/dt = 1.
EstimatorState averaging_rhs(const EstimatorState& s, const MixedSignals& mixed, double gamma,
                             std::span<const double> k);

EstimatorState estimator_rhs(const LawSpec& law, const EstimatorState& s, const MixedSignals& mixed);

/// Left side of the verifiable inequality: gamma delta^3 + delta delta_dot kappa_hat + delta_dot.
double inequality_lhs(double gamma, double delta, double delta_dot, double kappa_hat);

const char* law_name(const LawSpec& law);

}  // namespace avgdrem
