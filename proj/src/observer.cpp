#include "avgdrem/observer.hpp"

#include <cmath>
#include <string>

namespace avgdrem {

namespace {

void add_into(Vec& a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

// L C v, with L the all-ones row.
double sum_of(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

void validate(const PlantSpec& spec) {
    const std::size_t n = spec.n();
    if (!spec.A.square()) throw DimensionError("plant: A must be square");
    if (spec.C.cols() != n) throw DimensionError("plant: C must have " + std::to_string(n) + " columns");
    if (spec.K.rows() != n || spec.K.cols() != spec.p()) {
        throw DimensionError("plant: K must be " + std::to_string(n) + "x" + std::to_string(spec.p()));
    }
    if (spec.x0.size() != n || spec.chi0.size() != n) throw DimensionError("plant: x0 and chi0 need length n");
    if (spec.delta.size() != spec.p()) throw DimensionError("plant: delta needs one signal per output");
    if (!spec.phi_map || !spec.G_map) throw ParameterError("plant: phi_map and G_map are required");
    if (spec.theta.empty()) throw ParameterError("plant: theta must be non-empty");
    const Vec y0(spec.p(), 0.0);
    const Vec u0 = eval_signals(spec.u, 0.0);
    if (spec.phi_map(y0, u0).size() != n) throw DimensionError("plant: phi_map must return length n");
    const Mat g0 = spec.G_map(y0, u0);
    if (g0.rows() != n || g0.cols() != spec.q()) throw DimensionError("plant: G_map must return n x q");
    try {
        solve_lyapunov(spec.a_k(), Mat::identity(n));
    } catch (const SolverError& e) {
        throw SolverError(std::string("plant: A - K C is not Hurwitz (") + e.what() + ")");
    }
}

ObserverState initial_observer_state(const PlantSpec& spec) {
    const std::size_t n = spec.n();
    return ObserverState{spec.x0, spec.chi0, Vec(n, 0.0), Mat(n, spec.q()), Mat::identity(n), Vec(n, 0.0)};
}

Vec plant_output(const PlantSpec& spec, const Vec& x, double t) {
    Vec y = spec.C * x;
    add_into(y, eval_signals(spec.delta, t));
    return y;
}

Vec plant_rhs(const PlantSpec& spec, const Vec& x, double t) {
    const Vec y = plant_output(spec, x, t);
    const Vec u = eval_signals(spec.u, t);
    Vec dx = spec.A * x;
    add_into(dx, spec.phi_map(y, u));
    add_into(dx, spec.G_map(y, u) * spec.theta);
    return dx;
}

ObserverState filters_rhs(const PlantSpec& spec, const ObserverState& obs, const Vec& y, const Vec& u) {
    const Mat ak = spec.a_k();
    const Vec delta = y - spec.C * obs.x;  // simulator-only: the true output disturbance
    ObserverState d;
    d.x = Vec(spec.n(), 0.0);
    d.chi = ak * obs.chi;
    add_into(d.chi, spec.K * y);
    d.P = ak * obs.P;
    add_into(d.P, spec.phi_map(y, u));
    d.Omega = ak * obs.Omega + spec.G_map(y, u);
    d.PhiK = ak * obs.PhiK;
    d.delta_f = ak * obs.delta_f;
    add_into(d.delta_f, spec.K * delta);
    return d;
}

RegressionSample build_regression(const PlantSpec& spec, const ObserverState& obs, const Vec& y) {
    Vec innovation = y - spec.C * obs.chi;
    innovation = innovation - spec.C * obs.P;
    const Mat lc_omega = spec.C * obs.Omega;
    Vec phi_row(spec.q(), 0.0);
    for (std::size_t i = 0; i < lc_omega.rows(); ++i)
        for (std::size_t j = 0; j < lc_omega.cols(); ++j) phi_row[j] += lc_omega(i, j);

    const Vec e0 = spec.chi0 - spec.x0;
    const Vec delta = y - spec.C * obs.x;
    const double w = -sum_of(spec.C * (obs.PhiK * e0)) - sum_of(spec.C * obs.delta_f) + sum_of(delta);
    return RegressionSample{sum_of(innovation), std::move(phi_row), w};
}

Vec reconstruct_state(const ObserverState& obs, std::span<const double> theta_hat) {
    Vec xhat = obs.chi;
    add_into(xhat, obs.P);
    add_into(xhat, obs.Omega * theta_hat);
    return xhat;
}

Vec observation_error(const ObserverState& obs, std::span<const double> theta) {
    return reconstruct_state(obs, theta) - obs.x;
}

double epsilon_x_bound(const PlantSpec& spec, double delta_max, const Mat& q, double c) {
    const Vec q_eigs = symmetric_eigenvalues(q);
    const double q_min = q_eigs.front();
    if (!(c > 0.0) || !(c < q_min)) {
        throw ParameterError("epsilon_x_bound: c must satisfy 0 < c < lambda_min(Q) = " + std::to_string(q_min));
    }
    if (delta_max < 0.0) throw ParameterError("epsilon_x_bound: delta_max must be >= 0");
    const Mat pi = solve_lyapunov(spec.a_k(), q);
    const Vec pi_eigs = symmetric_eigenvalues(pi);
    const double gain = spectral_norm(pi * spec.K);
    return gain * delta_max * std::sqrt(pi_eigs.back() / (c * (q_min - c) * pi_eigs.front()));
}

double delta_max_bound(const PlantSpec& spec) {
    double s = 0.0;
    for (const auto& d : spec.delta) {
        const double b = d.abs_bound();
        s += b * b;
    }
    return std::sqrt(s);
}

}  // namespace avgdrem
