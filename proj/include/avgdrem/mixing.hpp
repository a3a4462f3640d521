#pragma once

// Mixing: multiplying Y = M theta + W by adj{M} decouples it into n scalar
// regressions scalY_i = delta * theta_i + scalW_i with delta = det{M}.

#include "avgdrem/extension.hpp"

namespace avgdrem {

struct MixedSignals {
    Vec scalY;
    double delta = 0.0;
    Vec scalW;
    double delta_dot = 0.0;
};

/// scalY = adj{M} Y, delta = det{M}, scalW = adj{M} W. delta_dot left at 0.
MixedSignals mix(const ExtensionState& state, const ExtensionScheme& scheme);

/// Jacobi's formula d/dt det{M} = tr(adj{M} dM/dt), with dM/dt = dPhi/dt for
/// Kreisselmeier and -dPhi/dt for the fe_decay scheme.
double delta_dot(const ExtensionState& state, const ExtensionState& state_dot, const ExtensionScheme& scheme);

/// mix() followed by delta_dot(), sharing one adjugate.
MixedSignals mix_with_rate(const ExtensionState& state, const ExtensionState& state_dot,
                           const ExtensionScheme& scheme);

}  // namespace avgdrem
