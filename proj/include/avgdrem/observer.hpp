#pragma once

// State reconstruction for x' = A x + phi(y, u) + G(y, u) theta,
// y = C x + delta(t), through the filters
//   chi' = A_K chi + K y,   P' = A_K P + phi(y, u),
//   Omega' = A_K Omega + G(y, u),   Phi_K' = A_K Phi_K,
// with A_K = A - K C. They yield the scalar regression
//   z = L (y - C chi - C P) = (L C Omega) theta + w,  L = [1 ... 1],
// and the estimate x_hat = chi + P + Omega theta_hat.

#include <functional>

#include "avgdrem/signals.hpp"

namespace avgdrem {

struct PlantSpec {
    Mat A;
    Mat C;
    Mat K;
    std::function<Vec(const Vec& y, const Vec& u)> phi_map;
    std::function<Mat(const Vec& y, const Vec& u)> G_map;
    Vec theta;
    std::vector<SignalExpr> delta;
    std::vector<SignalExpr> u;
    Vec x0;
    Vec chi0;

    [[nodiscard]] std::size_t n() const { return A.rows(); }
    [[nodiscard]] std::size_t p() const { return C.rows(); }
    [[nodiscard]] std::size_t q() const { return theta.size(); }
    [[nodiscard]] Mat a_k() const { return A - K * C; }
};

/// Shape checks plus the Hurwitz test of A - K C via a Lyapunov solve.
/// Throws DimensionError, ParameterError or SolverError.
void validate(const PlantSpec& spec);

struct ObserverState {
    Vec x;
    Vec chi;
    Vec P;
    Mat Omega;
    Mat PhiK;
    Vec delta_f;
};

/// x = x0, chi = chi0, P = 0, Omega = 0, Phi_K = I, delta_f = 0.
ObserverState initial_observer_state(const PlantSpec& spec);

Vec plant_output(const PlantSpec& spec, const Vec& x, double t);

Vec plant_rhs(const PlantSpec& spec, const Vec& x, double t);

/// Filter derivatives for the measured y and input u. The x field of the
/// result is left at zero; plant_rhs supplies it.
ObserverState filters_rhs(const PlantSpec& spec, const ObserverState& obs, const Vec& y, const Vec& u);

struct RegressionSample {
    double z = 0.0;
    Vec phi_row;
    /// Bookkeeping only: -L C Phi_K e0 - L C delta_f + L delta.
    double w = 0.0;
};

RegressionSample build_regression(const PlantSpec& spec, const ObserverState& obs, const Vec& y);

Vec reconstruct_state(const ObserverState& obs, std::span<const double> theta_hat);

/// e = chi + P + Omega theta - x.
Vec observation_error(const ObserverState& obs, std::span<const double> theta);

/// Steady-state reconstruction bound
///   ||Pi K|| delta_max sqrt(lambda_max(Pi) / (c (lambda_min(Q) - c) lambda_min(Pi)))
/// with A_K^T Pi + Pi A_K = -Q. Requires 0 < c < lambda_min(Q).
double epsilon_x_bound(const PlantSpec& spec, double delta_max, const Mat& q, double c);

/// Euclidean norm bound on delta(t) from the signal expressions.
double delta_max_bound(const PlantSpec& spec);

}  // namespace avgdrem
