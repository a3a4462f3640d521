#pragma once

// Regressor extension: turns the scalar regression y = phi^T theta + w into
// the matrix regression Y = M theta + W, where M is Phi for the
// Kreisselmeier filters and I - Phi for the finite-excitation scheme.

#include <span>

#include "avgdrem/smallmat.hpp"

namespace avgdrem {

struct ExtensionScheme {
    enum class Kind { kreisselmeier, fe_decay };
    Kind kind = Kind::kreisselmeier;
    /// Forgetting factor l (Kreisselmeier) or adaptation gain mu (fe_decay).
    double rate = 1.0;
};

/// Y, Phi and the disturbance bookkeeping W. The same shape serves as the
/// time derivative returned by the right-hand sides below.
struct ExtensionState {
    Vec Y;
    Mat Phi;
    Vec W;

    [[nodiscard]] std::size_t dim() const { return Y.size(); }
};

/// Zero Y and W; Phi = 0 for Kreisselmeier, Phi = I for fe_decay.
ExtensionState initial_extension_state(const ExtensionScheme& scheme, std::size_t n);

/// (-lY + phi y, -l Phi + phi phi^T, -lW + phi w).
ExtensionState kreisselmeier_rhs(const ExtensionState& s, std::span<const double> phi, double y, double w,
                                 double l);

/// (-mu phi (phi^T Y - y), -mu phi phi^T Phi, -mu phi phi^T W + mu phi w).
ExtensionState fe_extension_rhs(const ExtensionState& s, std::span<const double> phi, double y, double w,
                                double mu);

ExtensionState extension_rhs(const ExtensionScheme& scheme, const ExtensionState& s,
                             std::span<const double> phi, double y, double w);

/// The matrix the mixing step works with: Phi or I - Phi.
Mat effective_regressor(const ExtensionScheme& scheme, const Mat& phi);

}  // namespace avgdrem
