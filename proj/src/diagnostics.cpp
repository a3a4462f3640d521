#include "avgdrem/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "avgdrem/errors.hpp"

namespace avgdrem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t dim(const RegressorSamples& s) { return s.phi.empty() ? 0 : s.phi.front().size(); }

void check_samples(const RegressorSamples& s) {
    if (s.t.size() != s.phi.size()) throw DimensionError("regressor samples: t and phi lengths differ");
    if (s.t.size() < 2) throw ParameterError("regressor samples: need at least 2 samples");
    const std::size_t n = dim(s);
    for (const auto& p : s.phi)
        if (p.size() != n) throw DimensionError("regressor samples: ragged phi");
}

// Packed upper triangle of phi phi^T.
std::size_t tri_size(std::size_t n) { return n * (n + 1) / 2; }

void accumulate_outer(const Vec& p, double weight, std::vector<double>& g) {
    const std::size_t n = p.size();
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) g[k++] += weight * p[i] * p[j];
}

Mat unpack_tri(const std::vector<double>& g, std::size_t n) {
    Mat m(n, n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            m(i, j) = g[k];
            m(j, i) = g[k];
            ++k;
        }
    return m;
}

double lambda_min(const std::vector<double>& g, std::size_t n) {
    return symmetric_eigenvalues(unpack_tri(g, n)).front();
}

Vec lerp(const Vec& a, const Vec& b, double u) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + u * (b[i] - a[i]);
    return out;
}

// Sample value at time x by linear interpolation; x inside [t.front(), t.back()].
Vec phi_at(const RegressorSamples& s, double x) {
    const auto it = std::upper_bound(s.t.begin(), s.t.end(), x);
    if (it == s.t.begin()) return s.phi.front();
    if (it == s.t.end()) return s.phi.back();
    const std::size_t k = static_cast<std::size_t>(it - s.t.begin());
    const double u = (x - s.t[k - 1]) / (s.t[k] - s.t[k - 1]);
    return lerp(s.phi[k - 1], s.phi[k], u);
}

// Trapezoidal Gram over [a, b], endpoints interpolated.
std::vector<double> gram(const RegressorSamples& s, double a, double b) {
    const std::size_t n = dim(s);
    std::vector<double> g(tri_size(n), 0.0);
    if (b <= a) return g;
    const auto first = std::upper_bound(s.t.begin(), s.t.end(), a);
    double prev_t = a;
    Vec prev = phi_at(s, a);
    for (auto it = first; it != s.t.end() && *it < b; ++it) {
        const std::size_t k = static_cast<std::size_t>(it - s.t.begin());
        const double h = s.t[k] - prev_t;
        accumulate_outer(prev, 0.5 * h, g);
        accumulate_outer(s.phi[k], 0.5 * h, g);
        prev_t = s.t[k];
        prev = s.phi[k];
    }
    const Vec last = phi_at(s, b);
    accumulate_outer(prev, 0.5 * (b - prev_t), g);
    accumulate_outer(last, 0.5 * (b - prev_t), g);
    return g;
}

// Indices k with t_k + len <= t_end, tolerant to grid rounding.
std::size_t window_count(const RegressorSamples& s, double len) {
    const double end = s.t.back();
    const double tol = 1e-9 * std::max(1.0, std::abs(end));
    std::size_t count = 0;
    while (count < s.t.size() && s.t[count] + len <= end + tol) ++count;
    return count;
}

void check_window_len(const RegressorSamples& s, double len) {
    check_samples(s);
    if (!(len > 0.0)) throw ParameterError("pe_level: window length must be > 0");
    if (s.t.back() - s.t.front() < len * (1.0 - 1e-12)) {
        throw ParameterError(fmt::format("pe_level: trace spans {} s, shorter than the window {} s",
                                         s.t.back() - s.t.front(), len));
    }
}

}  // namespace

RegressorSamples RegressorSamples::from_trace(const Trace& trace) {
    std::vector<std::size_t> cols;
    for (std::size_t i = 1; trace.has("phi_" + std::to_string(i)); ++i) cols.push_back(trace.index("phi_" + std::to_string(i)));
    if (cols.empty()) throw std::out_of_range("trace has no column 'phi_1'");
    RegressorSamples s;
    s.t.reserve(trace.size());
    s.phi.reserve(trace.size());
    for (const auto& row : trace.rows) {
        s.t.push_back(row[0]);
        Vec p(cols.size());
        for (std::size_t i = 0; i < cols.size(); ++i) p[i] = row[cols[i]];
        s.phi.push_back(std::move(p));
    }
    return s;
}

double fe_level(const RegressorSamples& s, Window w) {
    check_samples(s);
    const double tol = 1e-9 * std::max(1.0, std::abs(s.t.back()));
    if (!(w.end > w.start)) throw ParameterError("fe_level: empty window");
    if (w.start < s.t.front() - tol || w.end > s.t.back() + tol) {
        throw ParameterError(fmt::format("fe_level: window [{}, {}] outside trace [{}, {}]", w.start, w.end,
                                         s.t.front(), s.t.back()));
    }
    return lambda_min(gram(s, std::max(w.start, s.t.front()), std::min(w.end, s.t.back())), dim(s));
}

double pe_level(const RegressorSamples& s, double window_len) {
    check_window_len(s, window_len);
    const std::size_t n = dim(s);
    const std::size_t m = tri_size(n);
    const std::size_t count = window_count(s, window_len);

    // Cumulative trapezoidal Gram at every sample.
    std::vector<std::vector<double>> cum(s.t.size(), std::vector<double>(m, 0.0));
    for (std::size_t k = 1; k < s.t.size(); ++k) {
        cum[k] = cum[k - 1];
        const double h = s.t[k] - s.t[k - 1];
        accumulate_outer(s.phi[k - 1], 0.5 * h, cum[k]);
        accumulate_outer(s.phi[k], 0.5 * h, cum[k]);
    }

    double best = kInf;
#pragma omp parallel for reduction(min : best) schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(count); ++k) {
        const double a = s.t[static_cast<std::size_t>(k)];
        const double b = std::min(a + window_len, s.t.back());
        // last sample at or before b
        const auto it = std::upper_bound(s.t.begin(), s.t.end(), b);
        const std::size_t j = static_cast<std::size_t>(it - s.t.begin()) - 1;
        std::vector<double> g(m);
        for (std::size_t e = 0; e < m; ++e) g[e] = cum[j][e] - cum[static_cast<std::size_t>(k)][e];
        if (b > s.t[j]) {
            const double h = b - s.t[j];
            accumulate_outer(s.phi[j], 0.5 * h, g);
            accumulate_outer(phi_at(s, b), 0.5 * h, g);
        }
        best = std::min(best, lambda_min(g, n));
    }
    return best;
}

double pe_level_serial(const RegressorSamples& s, double window_len) {
    check_window_len(s, window_len);
    const std::size_t count = window_count(s, window_len);
    double best = kInf;
    for (std::size_t k = 0; k < count; ++k) {
        const double a = s.t[k];
        best = std::min(best, lambda_min(gram(s, a, std::min(a + window_len, s.t.back())), dim(s)));
    }
    return best;
}

InequalityCheck check_inequality(std::span<const double> t, std::span<const double> delta,
                                 std::span<const double> lhs, double from) {
    if (t.size() != delta.size() || t.size() != lhs.size()) {
        throw DimensionError("check_inequality: sample sequences differ in length");
    }
    InequalityCheck out;
    double inf = kInf;
    bool any = false;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < from) continue;
        if (!(delta[k] > 0.0)) {
            out.failed_at = t[k];
            out.message = fmt::format("Delta = {} <= 0 at t = {}", delta[k], t[k]);
            out.eta_max = 0.0;
            return out;
        }
        if (!std::isfinite(lhs[k])) {
            out.failed_at = t[k];
            out.message = fmt::format("inequality left-hand side is not finite at t = {}", t[k]);
            out.eta_max = 0.0;
            return out;
        }
        inf = std::min(inf, lhs[k] / delta[k]);
        any = true;
    }
    if (!any) {
        out.failed_at = from;
        out.message = fmt::format("no samples with t >= {}", from);
        return out;
    }
    out.eta_max = std::max(inf, 0.0);
    return out;
}

InequalityCheck check_inequality(std::span<const double> t, std::span<const double> delta,
                                 std::span<const double> delta_dot, std::span<const double> kappa_hat, double gamma,
                                 double from) {
    if (delta_dot.size() != delta.size() || kappa_hat.size() != delta.size()) {
        throw DimensionError("check_inequality: sample sequences differ in length");
    }
    std::vector<double> lhs(delta.size());
    for (std::size_t k = 0; k < delta.size(); ++k) {
        const double d = delta[k];
        lhs[k] = gamma * d * d * d + d * delta_dot[k] * kappa_hat[k] + delta_dot[k];
    }
    return check_inequality(t, delta, lhs, from);
}

C2Integral c2_integral(std::span<const double> t, std::span<const double> delta,
                       const std::vector<std::vector<double>>& scal_w, double from) {
    if (t.size() != delta.size()) throw DimensionError("c2_integral: t and delta differ in length");
    for (const auto& w : scal_w)
        if (w.size() != t.size()) throw DimensionError("c2_integral: W channel length differs from t");
    const std::size_t n = scal_w.size();
    C2Integral out;
    out.running.assign(n, {});
    out.sup.assign(n, 0.0);
    std::vector<double> acc(n, 0.0);
    std::optional<std::size_t> prev;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < from) continue;
        if (!(delta[k] > 0.0)) {
            out.failed_at = t[k];
            return out;
        }
        if (prev) {
            const double h = t[k] - t[*prev];
            for (std::size_t i = 0; i < n; ++i)
                acc[i] += 0.5 * h * (scal_w[i][*prev] / delta[*prev] + scal_w[i][k] / delta[k]);
        }
        out.t.push_back(t[k]);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = std::abs(acc[i]);
            out.running[i].push_back(v);
            out.sup[i] = std::max(out.sup[i], v);
        }
        prev = k;
    }
    return out;
}

std::optional<double> t_detect(std::span<const double> t, std::span<const double> delta, double fraction,
                               double terminal_share) {
    if (t.size() != delta.size()) throw DimensionError("t_detect: t and delta differ in length");
    if (t.empty()) return std::nullopt;
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ParameterError("t_detect: fraction must be in (0, 1]");
    if (!(terminal_share > 0.0 && terminal_share <= 1.0)) {
        throw ParameterError("t_detect: terminal share must be in (0, 1]");
    }
    const std::size_t tail = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(terminal_share * static_cast<double>(t.size()))));
    const double tail_min = *std::min_element(delta.end() - static_cast<std::ptrdiff_t>(tail), delta.end());
    if (!(tail_min > 0.0)) return std::nullopt;
    const double threshold = fraction * tail_min;
    std::size_t k = t.size();
    while (k > 0 && delta[k - 1] >= threshold) --k;
    return t[k];
}

ExcitationReport analyze_trace(const Trace& trace, const ReportOptions& opt) {
    if (trace.size() < 2) throw ParameterError("analyze_trace: need at least 2 samples");
    ExcitationReport r;
    const std::vector<double> t = trace.column("t");
    const std::vector<double> delta = trace.column("delta");

    const RegressorSamples phi = RegressorSamples::from_trace(trace);
    r.window = {t.front(), t.back()};
    r.alpha = fe_level(phi, r.window);

    const double late = t.front() + opt.late_share * (t.back() - t.front());
    RegressorSamples tail;
    for (std::size_t k = 0; k < phi.t.size(); ++k)
        if (phi.t[k] >= late) {
            tail.t.push_back(phi.t[k]);
            tail.phi.push_back(phi.phi[k]);
        }
    r.pe_window = opt.pe_window;
    if (tail.t.size() >= 2 && tail.t.back() - tail.t.front() >= opt.pe_window) {
        r.pe_range = {tail.t.front(), tail.t.back()};
        r.pe_alpha = pe_level(tail, opt.pe_window);
    }

    r.delta_ub = *std::max_element(delta.begin(), delta.end());
    r.T_detect = t_detect(t, delta, opt.detect_fraction, opt.terminal_share);
    const double from = r.T_detect.value_or(t.back());
    r.delta_lb = kInf;
    for (std::size_t k = 0; k < t.size(); ++k)
        if (t[k] >= from) r.delta_lb = std::min(r.delta_lb, delta[k]);

    if (trace.has("ineq_lhs") && r.T_detect) {
        const std::vector<double> lhs = trace.column("ineq_lhs");
        if (std::none_of(lhs.begin(), lhs.end(), [](double v) { return std::isnan(v); })) {
            const InequalityCheck chk = check_inequality(t, delta, lhs, *r.T_detect);
            r.eta_max = chk.eta_max;
            r.inequality_failed_at = chk.failed_at;
        }
    }

    std::vector<std::vector<double>> scal_w;
    for (std::size_t i = 1; trace.has("scalW_" + std::to_string(i)); ++i) scal_w.push_back(trace.column("scalW_" + std::to_string(i)));
    for (const auto& w : scal_w) {
        double m = 0.0;
        for (double v : w) m = std::max(m, std::abs(v));
        r.c1_bound.push_back(m);
    }
    if (r.T_detect) {
        const C2Integral c2 = c2_integral(t, delta, scal_w, *r.T_detect);
        r.c2_sup = c2.sup;
        // Growing when the second half reaches well past the first half.
        const std::size_t half = c2.t.size() / 2;
        for (const auto& run : c2.running) {
            if (half == 0) {
                r.c2_growing.push_back(false);
                continue;
            }
            const double first = *std::max_element(run.begin(), run.begin() + static_cast<std::ptrdiff_t>(half));
            const double second = *std::max_element(run.begin() + static_cast<std::ptrdiff_t>(half), run.end());
            r.c2_growing.push_back(second > 1.5 * first);
        }
    }
    return r;
}

namespace {

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json finite_json(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

void to_json(nlohmann::json& j, const ExcitationReport& r) {
    j = nlohmann::json{
        {"alpha", r.alpha},
        {"window", {r.window.start, r.window.end}},
        {"pe_alpha", r.pe_alpha},
        {"pe_window", r.pe_window},
        {"pe_range", {r.pe_range.start, r.pe_range.end}},
        {"T_detect", opt_json(r.T_detect)},
        {"delta_lb", finite_json(r.delta_lb)},
        {"delta_ub", r.delta_ub},
        {"eta_max", opt_json(r.eta_max)},
        {"inequality_failed_at", opt_json(r.inequality_failed_at)},
        {"c1_bound", r.c1_bound},
        {"c2_sup", r.c2_sup},
        {"c2_growing", r.c2_growing},
    };
}

}  // namespace avgdrem
