#pragma once

// Time-signal expressions and the regression problem they define:
//   y(t) = phi(t)^T theta + w(t).

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "avgdrem/smallmat.hpp"

namespace avgdrem {

/// Closed expression grammar over time: constant, sinusoid, exponential
/// decay, sums and scalings. Immutable; copies share structure.
class SignalExpr {
public:
    struct Constant {
        double value = 0.0;
    };
    struct Sine {
        double amplitude = 1.0;
        double frequency = 1.0;  // rad/s
        double phase = 0.0;
    };
    struct ExpDecay {
        double rate = 1.0;
    };
    struct Sum {
        std::vector<SignalExpr> terms;
    };
    struct Scale {
        double factor = 1.0;
        std::vector<SignalExpr> inner;  // exactly one element
    };
    using Node = std::variant<Constant, Sine, ExpDecay, Sum, Scale>;

    SignalExpr() : SignalExpr(Constant{0.0}) {}
    SignalExpr(Node node);  // NOLINT(google-explicit-constructor)

    static SignalExpr constant(double c) { return SignalExpr(Constant{c}); }
    static SignalExpr sine(double amplitude, double frequency, double phase = 0.0) {
        return SignalExpr(Sine{amplitude, frequency, phase});
    }
    static SignalExpr exp_decay(double rate) { return SignalExpr(ExpDecay{rate}); }
    static SignalExpr sum(std::vector<SignalExpr> terms) { return SignalExpr(Sum{std::move(terms)}); }
    static SignalExpr scale(double factor, SignalExpr inner) {
        return SignalExpr(Scale{factor, {std::move(inner)}});
    }

    [[nodiscard]] double operator()(double t) const;

    /// Upper bound on |s(t)| over t >= 0 (triangle inequality over the tree).
    [[nodiscard]] double abs_bound() const;

    [[nodiscard]] const Node& node() const { return *node_; }

private:
    std::shared_ptr<const Node> node_;
};

/// The synthetic linear regression: regressor, true parameters, disturbance.
struct RegressionProblem {
    std::vector<SignalExpr> regressor;
    Vec theta;
    SignalExpr disturbance;

    [[nodiscard]] std::size_t dim() const { return regressor.size(); }
};

Vec eval_regressor(const RegressionProblem& p, double t);
double eval_disturbance(const RegressionProblem& p, double t);
/// phi(t)^T theta + w(t).
double eval_output(const RegressionProblem& p, double t);

Vec eval_signals(const std::vector<SignalExpr>& signals, double t);

}  // namespace avgdrem
