#include "avgdrem/signals.hpp"

#include <cmath>

namespace avgdrem {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

SignalExpr::SignalExpr(Node node) : node_(std::make_shared<const Node>(std::move(node))) {
    if (const auto* s = std::get_if<Scale>(node_.get()); s != nullptr && s->inner.size() != 1) {
        throw ParameterError("scale expression needs exactly one inner signal");
    }
}

double SignalExpr::operator()(double t) const {
    return std::visit(Overloaded{
                          [](const Constant& c) { return c.value; },
                          [t](const Sine& s) { return s.amplitude * std::sin(s.frequency * t + s.phase); },
                          [t](const ExpDecay& e) { return std::exp(-e.rate * t); },
                          [t](const Sum& s) {
                              double acc = 0.0;
                              for (const auto& term : s.terms) acc += term(t);
                              return acc;
                          },
                          [t](const Scale& s) { return s.factor * s.inner.front()(t); },
                      },
                      *node_);
}

double SignalExpr::abs_bound() const {
    return std::visit(Overloaded{
                          [](const Constant& c) { return std::abs(c.value); },
                          [](const Sine& s) { return std::abs(s.amplitude); },
                          // e^{-rt} on t >= 0 is bounded by 1 only for r >= 0.
                          [](const ExpDecay& e) { return e.rate >= 0.0 ? 1.0 : HUGE_VAL; },
                          [](const Sum& s) {
                              double acc = 0.0;
                              for (const auto& term : s.terms) acc += term.abs_bound();
                              return acc;
                          },
                          [](const Scale& s) { return std::abs(s.factor) * s.inner.front().abs_bound(); },
                      },
                      *node_);
}

Vec eval_signals(const std::vector<SignalExpr>& signals, double t) {
    Vec out(signals.size());
    for (std::size_t i = 0; i < signals.size(); ++i) out[i] = signals[i](t);
    return out;
}

Vec eval_regressor(const RegressionProblem& p, double t) { return eval_signals(p.regressor, t); }

double eval_disturbance(const RegressionProblem& p, double t) { return p.disturbance(t); }

double eval_output(const RegressionProblem& p, double t) {
    return dot(eval_regressor(p, t), p.theta) + eval_disturbance(p, t);
}

}  // namespace avgdrem
