#include "avgdrem/estimators.hpp"

#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "avgdrem/errors.hpp"
#include "avgdrem/integrator.hpp"

namespace avgdrem {
namespace {

MixedSignals constant_mixing(double delta, const Vec& theta) {
    MixedSignals m;
    m.delta = delta;
    m.delta_dot = 0.0;
    m.scalY = delta * theta;
    m.scalW = Vec(theta.size(), 0.0);
    return m;
}

std::string validation_message(const LawSpec& law, std::size_t n) {
    try {
        validate(law, n);
    } catch (const ParameterError& e) {
        return e.what();
    }
    return {};
}

TEST(Estimators, Validation) {
    EXPECT_NE(validation_message(GradientLaw{0.0, {}}, 2).find("gamma must be > 0"), std::string::npos);
    EXPECT_NE(validation_message(AveragingLaw{1.0, {1.0, 0.0}, 0.0, {}, 0.0}, 2).find("k_i must be > 0"),
              std::string::npos);
    EXPECT_NE(validation_message(AveragingLaw{1.0, {1.0, -1.0}, 0.0, {}, 0.0}, 2).find("k_i must be > 0"),
              std::string::npos);
    EXPECT_THROW(validate(AveragingLaw{1.0, {1.0}, 0.0, {}, 0.0}, 2), ParameterError);
    EXPECT_NO_THROW(validate(AveragingLaw{1.0, {1.0, 2.0}, 0.0, {}, 0.0}, 2));
}

TEST(Estimators, InitialState) {
    const auto g = initial_estimator_state(GradientLaw{1.0, {}}, 2);
    EXPECT_EQ(g.theta_hat, Vec(2, 0.0));
    const auto a = initial_estimator_state(AveragingLaw{1.0, {1.0}, 0.5, {3.0}, 0.0}, 1);
    EXPECT_EQ(a.theta_hat, Vec{3.0});
    EXPECT_DOUBLE_EQ(a.kappa_hat, 0.5);
}

TEST(Estimators, InequalityLhs) {
    // delta = 1, delta_dot = 0 reduces to gamma
    EXPECT_DOUBLE_EQ(inequality_lhs(7.0, 1.0, 0.0, 123.0), 7.0);
    EXPECT_DOUBLE_EQ(inequality_lhs(2.0, 0.5, 3.0, 4.0), 2.0 * 0.125 + 0.5 * 3.0 * 4.0 + 3.0);
}

TEST(Estimators, KappaRhs) {
    MixedSignals m = constant_mixing(2.0, {1.0});
    m.delta_dot = 0.5;
    EXPECT_DOUBLE_EQ(kappa_rhs(0.25, m, 3.0), -3.0 * 2.0 * (0.5 - 1.0) - 0.5 * 0.0625);
}

// delta = 2, gamma = 1: kappa' = -4 kappa + 2, kappa(0) = 0  =>  (1 - e^{-4t}) / 2.
TEST(Estimators, KappaClosedForm) {
    const MixedSignals m = constant_mixing(2.0, {0.0});
    SystemState s{0.0};
    const Rhs f = [&](double, std::span<const double> x, std::span<double> dx) { dx[0] = kappa_rhs(x[0], m, 1.0); };
    integrate(f, s, 0.0, 1.5, 1e-3, 1.5, [](double, std::span<const double>) {});
    EXPECT_NEAR(s[0], 0.5 * (1.0 - std::exp(-6.0)), 1e-12);
}

// 1/delta is an equilibrium of the kappa dynamics for any smooth delta(t).
TEST(EstimatorsProperty, InverseDeltaInvariant) {
    for (double t = 0.0; t < 5.0; t += 0.37) {
        MixedSignals m;
        m.delta = 1.5 + std::sin(t);
        m.delta_dot = std::cos(t);
        EXPECT_NEAR(kappa_rhs(1.0 / m.delta, m, 100.0), -m.delta_dot / (m.delta * m.delta), 1e-12);
    }
}

// Gradient law, scalar, constant delta: theta_tilde decays as exp(-gamma delta^2 t).
TEST(Estimators, GradientClosedForm) {
    const MixedSignals m = constant_mixing(0.5, {2.0});
    SystemState s{0.0};
    const Rhs f = [&](double, std::span<const double> x, std::span<double> dx) {
        const EstimatorState e{{x[0]}, 0.0, 0.0};
        dx[0] = gradient_rhs(e, m, 8.0).theta_hat[0];
    };
    integrate(f, s, 0.0, 1.0, 1e-3, 1.0, [](double, std::span<const double>) {});
    EXPECT_NEAR(s[0] - 2.0, -2.0 * std::exp(-2.0), 1e-12);
}

// Averaging law with kappa = 1/delta and no disturbance:
// d/dt[(t + k) theta_tilde] = 0, so theta_tilde(t) = k theta_tilde(0) / (t + k).
TEST(Estimators, AveragingClosedForm) {
    const Vec theta{1.0, -1.0};
    const MixedSignals m = constant_mixing(0.4, theta);
    const Vec k{0.5, 2.0};
    SystemState s{0.0, 0.0, 1.0 / 0.4, 0.0};  // theta_hat, kappa_hat, t
    const Rhs f = [&](double, std::span<const double> x, std::span<double> dx) {
        const EstimatorState e{{x[0], x[1]}, x[2], x[3]};
        const EstimatorState d = averaging_rhs(e, m, 10.0, k);
        dx[0] = d.theta_hat[0];
        dx[1] = d.theta_hat[1];
        dx[2] = d.kappa_hat;
        dx[3] = d.t;
    };
    integrate(f, s, 0.0, 6.0, 1e-3, 6.0, [](double, std::span<const double>) {});
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(s[i] - theta[i], k[i] * (-theta[i]) / (6.0 + k[i]), 1e-10);
    EXPECT_NEAR(s[2], 2.5, 1e-12);
    EXPECT_NEAR(s[3], 6.0, 1e-12);
}

TEST(Estimators, DispatchAndNames) {
    const MixedSignals m = constant_mixing(1.0, {1.0});
    const EstimatorState s{{0.0}, 1.0, 0.0};
    EXPECT_STREQ(law_name(GradientLaw{}), "gradient");
    EXPECT_STREQ(law_name(AveragingLaw{}), "averaging");
    EXPECT_DOUBLE_EQ(estimator_rhs(GradientLaw{2.0, {}}, s, m).theta_hat[0], 2.0);
    EXPECT_DOUBLE_EQ(estimator_rhs(AveragingLaw{2.0, {1.0}, 0.0, {}, 0.0}, s, m).theta_hat[0], 1.0);
}

}  // namespace
}  // namespace avgdrem
