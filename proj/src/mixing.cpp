#include "avgdrem/mixing.hpp"

namespace avgdrem {

namespace {

double jacobi_rate(const Mat& adj, const Mat& phi_dot, const ExtensionScheme& scheme) {
    const double tr = trace_prod(adj, phi_dot);
    return scheme.kind == ExtensionScheme::Kind::kreisselmeier ? tr : -tr;
}

MixedSignals mix_impl(const ExtensionState& state, const Mat& m, const Mat& adj) {
    return MixedSignals{adj * state.Y, det(m), adj * state.W, 0.0};
}

}  // namespace

MixedSignals mix(const ExtensionState& state, const ExtensionScheme& scheme) {
    const Mat m = effective_regressor(scheme, state.Phi);
    return mix_impl(state, m, adjugate(m));
}

double delta_dot(const ExtensionState& state, const ExtensionState& state_dot, const ExtensionScheme& scheme) {
    return jacobi_rate(adjugate(effective_regressor(scheme, state.Phi)), state_dot.Phi, scheme);
}

MixedSignals mix_with_rate(const ExtensionState& state, const ExtensionState& state_dot,
                           const ExtensionScheme& scheme) {
    const Mat m = effective_regressor(scheme, state.Phi);
    const Mat adj = adjugate(m);
    MixedSignals out = mix_impl(state, m, adj);
    out.delta_dot = jacobi_rate(adj, state_dot.Phi, scheme);
    return out;
}

}  // namespace avgdrem
