#include "avgdrem/estimators.hpp"

#include <string>

namespace avgdrem {

namespace {

void check_theta0(const Vec& theta0, std::size_t n) {
    if (!theta0.empty() && theta0.size() != n) {
        throw ParameterError("theta0 has length " + std::to_string(theta0.size()) + ", expected " +
                             std::to_string(n));
    }
}

}  // namespace

void validate(const LawSpec& law, std::size_t n) {
    if (const auto* g = std::get_if<GradientLaw>(&law)) {
        if (!(g->gamma > 0.0)) throw ParameterError("gamma must be > 0");
        check_theta0(g->theta0, n);
        return;
    }
    const auto& a = std::get<AveragingLaw>(law);
    if (!(a.gamma > 0.0)) throw ParameterError("gamma must be > 0");
    if (a.k.size() != n) {
        throw ParameterError("k has length " + std::to_string(a.k.size()) + ", expected " + std::to_string(n));
    }
    for (double ki : a.k) {
        if (!(ki > 0.0)) throw ParameterError("k_i must be > 0");
    }
    check_theta0(a.theta0, n);
}

EstimatorState initial_estimator_state(const LawSpec& law, std::size_t n) {
    EstimatorState s{Vec(n, 0.0), 0.0, 0.0};
    std::visit(
        [&](const auto& l) {
            if (!l.theta0.empty()) s.theta_hat = l.theta0;
        },
        law);
    if (const auto* a = std::get_if<AveragingLaw>(&law)) s.kappa_hat = a->kappa0;
    return s;
}

EstimatorState gradient_rhs(const EstimatorState& s, const MixedSignals& mixed, double gamma) {
    const std::size_t n = s.theta_hat.size();
    if (mixed.scalY.size() != n) throw DimensionError("gradient_rhs: dimension mismatch");
    EstimatorState d{Vec(n), 0.0, 1.0};
    for (std::size_t i = 0; i < n; ++i) {
        d.theta_hat[i] = -gamma * mixed.delta * (mixed.delta * s.theta_hat[i] - mixed.scalY[i]);
    }
    return d;
}

double kappa_rhs(double kappa_hat, const MixedSignals& mixed, double gamma) {
    return -gamma * mixed.delta * (mixed.delta * kappa_hat - 1.0) - mixed.delta_dot * kappa_hat * kappa_hat;
}

EstimatorState averaging_rhs(const EstimatorState& s, const MixedSignals& mixed, double gamma,
                             std::span<const double> k) {
    const std::size_t n = s.theta_hat.size();
    if (mixed.scalY.size() != n || k.size() != n) throw DimensionError("averaging_rhs: dimension mismatch");
    EstimatorState d{Vec(n), kappa_rhs(s.kappa_hat, mixed, gamma), 1.0};
    for (std::size_t i = 0; i < n; ++i) {
        const double vartheta = s.kappa_hat * mixed.scalY[i];
        d.theta_hat[i] = -(s.theta_hat[i] - vartheta) / (s.t + k[i]);
    }
    return d;
}

EstimatorState estimator_rhs(const LawSpec& law, const EstimatorState& s, const MixedSignals& mixed) {
    if (const auto* g = std::get_if<GradientLaw>(&law)) return gradient_rhs(s, mixed, g->gamma);
    const auto& a = std::get<AveragingLaw>(law);
    return averaging_rhs(s, mixed, a.gamma, a.k);
}

double inequality_lhs(double gamma, double delta, double delta_dot, double kappa_hat) {
    return gamma * delta * delta * delta + delta * delta_dot * kappa_hat + delta_dot;
}

const char* law_name(const LawSpec& law) {
    return std::holds_alternative<GradientLaw>(law) ? "gradient" : "averaging";
}

}  // namespace avgdrem
