// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "avgdrem/config.hpp"
#include "avgdrem/diagnostics.hpp"
#include "avgdrem/experiment.hpp"
#include "avgdrem/smallmat.hpp"

using namespace avgdrem;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
    std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

class Stopwatch {
public:
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct TimedRun {
    RunPlan plan;
    SimulationResult result;
    ExcitationReport report;
    nlohmann::json summary;
    double seconds = 0.0;
};

TimedRun timed(const RunPlan& plan) {
    TimedRun r{plan, {}, {}, {}, 0.0};
    const Stopwatch sw;
    r.result = simulate(plan);
    r.seconds = sw.seconds();
    r.report = analyze_trace(r.result.trace);
    r.summary = summarize(plan, r.result, r.report);
    return r;
}

ScenarioSpec bundled(const std::string& name) { return load_scenario(resolve_scenario(name)); }

RunPlan gradient_plan(const ScenarioSpec& s) { return {s, *s.gradient}; }
RunPlan averaging_plan(const ScenarioSpec& s) { return {s, *s.averaging}; }

double vmax(const nlohmann::json& arr) {
    double m = 0.0;
    for (const auto& v : arr) m = std::max(m, v.get<double>());
    return m;
}

// Max |theta_tilde_i| over the trailing `share` of the samples.
double tail_sup(const Trace& tr, const std::string& col, double share) {
    const auto v = tr.column(col);
    const std::size_t from = v.size() - std::max<std::size_t>(1, static_cast<std::size_t>(share * static_cast<double>(v.size())));
    double m = 0.0;
    for (std::size_t k = from; k < v.size(); ++k) m = std::max(m, std::abs(v[k]));
    return m;
}

double abs_sup(const std::vector<double>& v, std::size_t from, std::size_t to) {
    double m = 0.0;
    for (std::size_t k = from; k < to; ++k) m = std::max(m, std::abs(v[k]));
    return m;
}

std::string csv_text(const Trace& tr) {
    const auto path = std::filesystem::temp_directory_path() / fmt::format("avgdrem_acc_{}.csv", ::getpid());
    write_csv(tr, path);
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    std::filesystem::remove(path);
    return ss.str();
}

// Largest per-column change between two traces sampled on the same grid.
struct Refinement {
    double worst = 0.0;
    std::string worst_column;
    double worst_t = 0.0;
    std::map<std::string, double> per_column;
    bool shape_ok = true;
};

Refinement compare_traces(const Trace& a, const Trace& b) {
    Refinement r;
    if (a.columns != b.columns || a.size() != b.size()) {
        r.shape_ok = false;
        return r;
    }
    for (std::size_t j = 0; j < a.columns.size(); ++j) {
        double m = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double x = a.rows[k][j];
            const double y = b.rows[k][j];
            if (std::isnan(x) && std::isnan(y)) continue;
            const double d = (std::isnan(x) != std::isnan(y)) ? INFINITY : std::abs(x - y);
            if (d > m) m = d;
            if (d > r.worst) {
                r.worst = d;
                r.worst_column = a.columns[j];
                r.worst_t = a.rows[k][0];
            }
        }
        r.per_column[a.columns[j]] = m;
    }
    return r;
}

void criterion_1() {
    const Stopwatch sw;
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double adj_res = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 4);
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = u(rng);
        const Mat lhs = adjugate(m) * m;
        const double d = det(m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) adj_res = std::max(adj_res, std::abs(lhs(i, j) - (i == j ? d : 0.0)));
    }
    double lyap_res = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 4);
        Mat b(n, n), s(n, n), c(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                b(i, j) = u(rng);
                s(i, j) = u(rng);
                c(i, j) = u(rng);
            }
        // negative definite symmetric part => Hurwitz
        const Mat a = Mat::identity(n) * -0.1 - b * b.transposed() + (s - s.transposed());
        const Mat q = Mat::identity(n) + c * c.transposed();
        const Mat pi = solve_lyapunov(a, q);
        const Mat res = a.transposed() * pi + pi * a + q;
        lyap_res = std::max(lyap_res, res.max_abs());
    }
    const double secs = sw.seconds();
    report(1, "algebraic kernel", adj_res <= 1e-9 && lyap_res <= 1e-9 && secs < 1.0,
           fmt::format("max|adj(M)M - det(M)I| = {:.2e} (<= 1e-9), Lyapunov residual = {:.2e} (<= 1e-9), "
                       "{:.3f} s (< 1 s)",
                       adj_res, lyap_res, secs));
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_1();

    const ScenarioSpec a = bundled("scenario_a");
    const ScenarioSpec b = bundled("scenario_b");
    const ScenarioSpec c = bundled("scenario_c");

    const TimedRun a_avg = timed(averaging_plan(a));
    const TimedRun a_grad = timed(gradient_plan(a));
    const TimedRun b_avg = timed(averaging_plan(b));
    const TimedRun b_grad = timed(gradient_plan(b));

    // 2: mixing identity
    {
        const double ra = vmax(a_avg.summary["mixing_residual_max"]);
        const double rb = vmax(b_avg.summary["mixing_residual_max"]);
        const bool pass = a.step == 1e-3 && b.step == 1e-3 && ra <= 1e-5 && rb <= 1e-5 && a_avg.seconds < 10.0 &&
                          b_avg.seconds < 10.0;
        report(2, "mixing identity",
               pass,
               fmt::format("A (Kreisselmeier, h = {}) max|Y - D theta - W| = {:.2e}, {:.2f} s; B (finite-excitation "
                           "scheme, h = {}) = {:.2e}, {:.2f} s (<= 1e-5, < 10 s)",
                           a.step, ra, a_avg.seconds, b.step, rb, b_avg.seconds));
    }

    // 3: Jacobi consistency
    {
        const double dev = a_avg.summary["jacobi_deviation_max"].get<double>();
        report(3, "Jacobi consistency", dev <= 1e-5 && a.horizon == 300.0,
               fmt::format("scenario A over {} s: max|int(Ddot) - det| = {:.2e} (<= 1e-5)", a.horizon, dev));
    }

    // 4: verifiable inequality
    double eta_a = 0.0;
    {
        auto eta_of = [](const TimedRun& r, double gamma) {
            const Trace& tr = r.result.trace;
            return check_inequality(tr.column("t"), tr.column("delta"), tr.column("delta_dot"),
                                    tr.column("kappa_hat"), gamma, r.report.T_detect.value_or(tr.rows.back()[0]));
        };
        const auto ca = eta_of(a_avg, a.averaging->gamma);
        const auto cb = eta_of(b_avg, b.averaging->gamma);
        eta_a = ca.eta_max;
        const bool pass = a.averaging->gamma == 1e4 && b.averaging->gamma == 250.0 && ca.ok() && cb.ok() &&
                          ca.eta_max >= 50.0 && cb.eta_max >= 10.0;
        report(4, "verifiable inequality", pass,
               fmt::format("A (gamma = {:g}): eta_max = {:.3f} (>= 50) from T = {}; B (gamma = {:g}): eta_max = "
                           "{:.3f} (>= 10) from T = {}",
                           a.averaging->gamma, ca.eta_max, a_avg.report.T_detect.value_or(NAN), b.averaging->gamma,
                           cb.eta_max, b_avg.report.T_detect.value_or(NAN)));
    }

    // 5: undisturbed gradient convergence
    {
        ScenarioSpec s = a;
        std::get<RegressionProblem>(s.source).disturbance = SignalExpr::constant(0.0);
        s.horizon = 100.0;
        GradientLaw g = *s.gradient;
        g.gamma = 100.0;
        const SimulationResult r = simulate({s, g});
        const auto& last = r.trace.rows.back();
        const double e1 = last[r.trace.index("theta_tilde_1")];
        const double e2 = last[r.trace.index("theta_tilde_2")];
        const double norm = std::hypot(e1, e2);
        report(5, "undisturbed gradient convergence", !r.failure && norm <= 1e-3,
               fmt::format("scenario A, w = 0, gamma = 100: |theta_tilde(100)| = {:.3e} (<= 1e-3)", norm));
    }

    // 6: averaging vs gradient on channel 2
    {
        const double e300 = std::abs(a_avg.result.trace.at("theta_tilde_2", 300.0));
        const double e10 = std::abs(a_avg.result.trace.at("theta_tilde_2", 10.0));
        const double g300 = std::abs(a_grad.result.trace.at("theta_tilde_2", 300.0));
        const bool pass = a.averaging->k == Vec{1e-3, 1e-3} && e300 <= 0.05 && e300 <= 0.1 * e10 && g300 >= 5.0 * e300;
        report(6, "averaging removes the channel-2 disturbance", pass,
               fmt::format("|theta_tilde_2(300)| = {:.4e} (<= 0.05), |theta_tilde_2(10)| = {:.4e} (ratio {:.4f} <= "
                           "0.1); gradient |theta_tilde_2(300)| = {:.4e} (>= 5x = {:.4e})",
                           e300, e10, e300 / e10, g300, 5.0 * e300));
    }

    // 7: asymptotic error bound
    {
        const auto& sm = a_avg.summary;
        bool pass = sm["s1_bound"].is_array();
        std::string detail = fmt::format("kappa_tilde(T) = {:.2e}, D_LB = {:.4f}, D_UB = {:.4f};",
                                         sm["kappa_tilde_T"].get<double>(), sm["delta_lb"].get<double>(),
                                         sm["delta_ub"].get<double>());
        for (std::size_t i = 0; i < 2; ++i) {
            const std::string col = fmt::format("theta_tilde_{}", i + 1);
            const double lim = tail_sup(a_avg.result.trace, col, 0.1);
            const double bound = sm["s1_bound"][i].get<double>();
            const double whole = sm["sup_theta_tilde"][i].get<double>();
            pass = pass && lim <= bound;
            detail += fmt::format(" ch{}: terminal-window sup {:.4e} <= bound {:.4e} (W_max {:.4f}; sup over whole "
                                  "horizon incl. t0: {:.4f})",
                                  i + 1, lim, bound, sm["W_max"][i].get<double>(), whole);
        }
        report(7, "asymptotic error bound", pass, detail);
    }

    // 8: kappa_tilde exponential decay
    {
        const double t0 = a_avg.report.T_detect.value_or(0.0);
        const KappaProbe p = kappa_decay_probe(a, *a.averaging, t0, 5.0 / eta_a);
        const bool pass = p.slope <= -0.8 * eta_a;
        report(8, "kappa_tilde exponential decay", pass,
               fmt::format("kappa_hat reset to {} at T_detect = {} (kappa_tilde = {:.3f}); slope of log|kappa_tilde| "
                           "over [{}, {:.4f}] = {:.2f} (<= -0.8 eta_max = {:.2f}); unperturbed kappa_tilde(T) = {:.2e}",
                           a.averaging->kappa0, t0, p.kappa_tilde_start, t0, p.t.back(), p.slope, -0.8 * eta_a,
                           a_avg.summary["kappa_tilde_T"].get<double>()));
    }

    // 9: finite excitation without persistence
    {
        const Trace& tr = b_avg.result.trace;
        const RegressorSamples phi = RegressorSamples::from_trace(tr);
        const double fe = fe_level(phi, {phi.t.front(), phi.t.back()});
        const ExcitationReport& rep = b_avg.report;
        const double pe = rep.pe_alpha;
        const double e2 = std::abs(tr.rows.back()[tr.index("theta_tilde_2")]);
        const auto th1 = tr.column("theta_tilde_1");
        const std::size_t half = th1.size() / 2;
        const double first = abs_sup(th1, 0, half);
        const double second = abs_sup(th1, half, th1.size());
        const bool bounded = std::isfinite(second) && second <= 2.0 * first;
        const bool pass = pe <= 0.01 * fe && rep.T_detect && rep.delta_lb > 0.0 && e2 <= 0.05 && bounded;
        report(9, "excitation transfer under finite excitation", pass,
               fmt::format("late pe_level (window {:.4f} over [{}, {}]) = {:.2e} <= 0.01 fe_level = {:.4e}; "
                           "min D for t >= {} = {:.4f} > 0; |theta_tilde_2(300)| = {:.4e} (<= 0.05); "
                           "sup|theta_tilde_1| first half {:.4f}, second half {:.4f}",
                           rep.pe_window, rep.pe_range.start, rep.pe_range.end, pe, 0.01 * fe,
                           rep.T_detect.value_or(NAN), rep.delta_lb, e2, first, second));
    }

    // 10: observer
    const TimedRun c_avg = timed(averaging_plan(c));
    const TimedRun c_grad = timed(gradient_plan(c));
    {
        const double ident = c_avg.summary["error_identity_max"].get<double>();
        const double eps = c_avg.summary["epsilon_x"].get<double>();
        const double xa = c_avg.summary["xtilde_terminal"].get<double>();
        const double xg = c_grad.summary["xtilde_terminal"].get<double>();
        const bool pass =
            c.step == 1e-4 && ident <= 1e-5 && xa <= eps && xa < xg && c_avg.seconds < 60.0 && c_grad.seconds < 60.0;
        report(10, "adaptive observer", pass,
               fmt::format("h = {}: max|e - PhiK e0 - delta_f| = {:.2e} (<= 1e-5); terminal |x_tilde| (max over last "
                           "10%): averaging {:.4f} <= eps_x = {:.4f}, gradient {:.4f}; {:.1f} s + {:.1f} s (< 60 s)",
                           c.step, ident, xa, eps, xg, c_avg.seconds, c_grad.seconds));
    }

    // 11: determinism and step refinement
    {
        bool pass = true;
        std::string detail;
        const std::vector<const TimedRun*> base = {&a_grad, &a_avg, &b_grad, &b_avg, &c_grad, &c_avg};
        std::vector<RunPlan> again, halved;
        for (const TimedRun* r : base) {
            again.push_back(r->plan);
            RunPlan h = r->plan;
            h.scenario.step = r->plan.scenario.step / 2.0;
            halved.push_back(h);
        }
        const std::vector<SimulationResult> rep = run_sweep(again);
        const std::vector<SimulationResult> fine = run_sweep(halved);
        for (std::size_t i = 0; i < base.size(); ++i) {
            const TimedRun& r = *base[i];
            const std::string tag = fmt::format("{}/{}", r.plan.scenario.name, law_name(r.plan.law));
            const bool identical = csv_text(r.result.trace) == csv_text(rep[i].trace);
            const Refinement ref = compare_traces(r.result.trace, fine[i].trace);
            double others = 0.0;
            for (const auto& [col, d] : ref.per_column)
                if (col != ref.worst_column) others = std::max(others, d);
            const bool ok = identical && ref.shape_ok && ref.worst <= 1e-5;
            pass = pass && ok;
            detail += fmt::format(" {}: {}, max change {:.2e} in {} at t = {}{};", tag,
                                  identical ? "byte-identical" : "NOT identical", ref.worst, ref.worst_column,
                                  ref.worst_t, ref.worst > 1e-5 ? fmt::format(" (all other columns {:.2e})", others) : "");
        }
        report(11, "determinism and step refinement", pass, "(<= 1e-5)" + detail);
    }

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
