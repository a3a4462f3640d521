#include "avgdrem/extension.hpp"

namespace avgdrem {

namespace {

void check_dims(const ExtensionState& s, std::span<const double> phi) {
    const std::size_t n = phi.size();
    if (s.Y.size() != n || s.W.size() != n || s.Phi.rows() != n || s.Phi.cols() != n) {
        throw DimensionError("extension: state dimension does not match regressor length " + std::to_string(n));
    }
}

}  // namespace

ExtensionState initial_extension_state(const ExtensionScheme& scheme, std::size_t n) {
    ExtensionState s{Vec(n, 0.0), Mat(n, n), Vec(n, 0.0)};
    if (scheme.kind == ExtensionScheme::Kind::fe_decay) s.Phi = Mat::identity(n);
    return s;
}

ExtensionState kreisselmeier_rhs(const ExtensionState& s, std::span<const double> phi, double y, double w,
                                 double l) {
    check_dims(s, phi);
    const std::size_t n = phi.size();
    ExtensionState d{Vec(n), outer(phi, phi) - l * s.Phi, Vec(n)};
    for (std::size_t i = 0; i < n; ++i) {
        d.Y[i] = -l * s.Y[i] + phi[i] * y;
        d.W[i] = -l * s.W[i] + phi[i] * w;
    }
    return d;
}

ExtensionState fe_extension_rhs(const ExtensionState& s, std::span<const double> phi, double y, double w,
                                double mu) {
    check_dims(s, phi);
    const std::size_t n = phi.size();
    const double phi_y = dot(phi, s.Y);
    const double phi_w = dot(phi, s.W);
    // phi phi^T Phi = phi (Phi^T phi)^T
    const Vec phi_t_phi = s.Phi.transposed() * phi;
    ExtensionState d{Vec(n), -mu * outer(phi, phi_t_phi), Vec(n)};
    for (std::size_t i = 0; i < n; ++i) {
        d.Y[i] = -mu * phi[i] * (phi_y - y);
        d.W[i] = -mu * phi[i] * (phi_w - w);
    }
    return d;
}

ExtensionState extension_rhs(const ExtensionScheme& scheme, const ExtensionState& s,
                             std::span<const double> phi, double y, double w) {
    return scheme.kind == ExtensionScheme::Kind::kreisselmeier ? kreisselmeier_rhs(s, phi, y, w, scheme.rate)
                                                               : fe_extension_rhs(s, phi, y, w, scheme.rate);
}

Mat effective_regressor(const ExtensionScheme& scheme, const Mat& phi) {
    if (scheme.kind == ExtensionScheme::Kind::kreisselmeier) return phi;
    return Mat::identity(phi.rows()) - phi;
}

}  // namespace avgdrem
