#include "avgdrem/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace avgdrem {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Vec to_vec(std::span<const double> s) { return Vec(s.begin(), s.end()); }

void put(std::span<double> dst, std::span<const double> src) { std::copy(src.begin(), src.end(), dst.begin()); }

}  // namespace

std::size_t ScenarioSpec::regression_dim() const {
    if (const auto* p = std::get_if<PlantSpec>(&source)) return p->q();
    return std::get<RegressionProblem>(source).dim();
}

const Vec& ScenarioSpec::theta() const {
    if (const auto* p = std::get_if<PlantSpec>(&source)) return p->theta;
    return std::get<RegressionProblem>(source).theta;
}

void validate(const ScenarioSpec& spec) {
    if (!(spec.extension.rate > 0.0)) {
        throw ParameterError(spec.extension.kind == ExtensionScheme::Kind::kreisselmeier ? "l must be > 0"
                                                                                         : "mu must be > 0");
    }
    if (!(spec.step > 0.0)) throw ParameterError("step must be > 0");
    if (!(spec.horizon >= 0.0)) throw ParameterError("horizon must be >= 0");
    if (!(spec.sample_every >= spec.step)) throw ParameterError("sample_every must be >= step");
    if (const auto* r = std::get_if<RegressionProblem>(&spec.source)) {
        if (r->dim() == 0) throw ParameterError("regressor must have at least one entry");
        if (r->theta.size() != r->dim()) throw ParameterError("theta length must match the regressor");
    } else {
        validate(std::get<PlantSpec>(spec.source));
    }
    if (!spec.gradient && !spec.averaging) throw ParameterError("scenario defines no estimation law");
    const std::size_t n = spec.regression_dim();
    if (spec.gradient) validate(LawSpec{*spec.gradient}, n);
    if (spec.averaging) validate(LawSpec{*spec.averaging}, n);
    if (spec.bound) {
        if (spec.bound->q.rows() != spec.bound->q.cols()) throw ParameterError("bound.q must be square");
        if (!(spec.bound->c > 0.0)) throw ParameterError("bound.c must be > 0");
    }
}

Simulation::Simulation(RunPlan plan) : plan_(std::move(plan)) {
    validate(plan_.scenario);
    n_ = plan_.scenario.regression_dim();
    validate(plan_.law, n_);
    if (const auto* p = std::get_if<PlantSpec>(&plan_.scenario.source)) {
        nx_ = p->n();
        layout_.add("x", nx_);
        layout_.add("chi", nx_);
        layout_.add("P", nx_);
        layout_.add("Omega", nx_ * p->q());
        layout_.add("PhiK", nx_ * nx_);
        layout_.add("delta_f", nx_);
    }
    layout_.add("Y", n_);
    layout_.add("Phi", n_ * n_);
    layout_.add("W", n_);
    layout_.add("theta_hat", n_);
    if (std::holds_alternative<AveragingLaw>(plan_.law)) layout_.add("kappa_hat", 1);
    layout_.add("delta_jacobi", 1);
}

SystemState Simulation::initial_state() const {
    SystemState s(layout_.size(), 0.0);
    std::span<double> v(s);
    if (const auto* p = std::get_if<PlantSpec>(&plan_.scenario.source)) {
        const ObserverState obs = initial_observer_state(*p);
        put(layout_.view(v, "x"), obs.x);
        put(layout_.view(v, "chi"), obs.chi);
        put(layout_.view(v, "PhiK"), obs.PhiK.data());
    }
    const ExtensionState ext = initial_extension_state(plan_.scenario.extension, n_);
    put(layout_.view(v, "Phi"), ext.Phi.data());
    const EstimatorState est = initial_estimator_state(plan_.law, n_);
    put(layout_.view(v, "theta_hat"), est.theta_hat);
    if (layout_.contains("kappa_hat")) layout_.view(v, "kappa_hat")[0] = est.kappa_hat;
    // det of the initial effective regressor is 0 for both schemes
    layout_.view(v, "delta_jacobi")[0] = det(effective_regressor(plan_.scenario.extension, ext.Phi));
    return s;
}

Simulation::Snapshot Simulation::evaluate(double t, std::span<const double> s) const {
    Snapshot snap;
    if (const auto* p = std::get_if<PlantSpec>(&plan_.scenario.source)) {
        ObserverState obs{to_vec(layout_.view(s, "x")),
                          to_vec(layout_.view(s, "chi")),
                          to_vec(layout_.view(s, "P")),
                          Mat::from_span(nx_, p->q(), layout_.view(s, "Omega")),
                          Mat::from_span(nx_, nx_, layout_.view(s, "PhiK")),
                          to_vec(layout_.view(s, "delta_f"))};
        const Vec y = plant_output(*p, obs.x, t);
        const Vec u = eval_signals(p->u, t);
        RegressionSample reg = build_regression(*p, obs, y);
        snap.phi = std::move(reg.phi_row);
        snap.y = reg.z;
        snap.w = reg.w;
        ObserverState d = filters_rhs(*p, obs, y, u);
        d.x = plant_rhs(*p, obs.x, t);
        snap.obs = std::move(obs);
        snap.obs_dot = std::move(d);
    } else {
        const auto& r = std::get<RegressionProblem>(plan_.scenario.source);
        snap.phi = eval_regressor(r, t);
        snap.w = eval_disturbance(r, t);
        snap.y = dot(snap.phi, r.theta) + snap.w;
    }

    snap.ext = ExtensionState{to_vec(layout_.view(s, "Y")), Mat::from_span(n_, n_, layout_.view(s, "Phi")),
                              to_vec(layout_.view(s, "W"))};
    snap.ext_dot = extension_rhs(plan_.scenario.extension, snap.ext, snap.phi, snap.y, snap.w);
    snap.mixed = mix_with_rate(snap.ext, snap.ext_dot, plan_.scenario.extension);

    snap.est.theta_hat = to_vec(layout_.view(s, "theta_hat"));
    snap.est.kappa_hat = layout_.contains("kappa_hat") ? layout_.view(s, "kappa_hat")[0] : 0.0;
    snap.est.t = t;
    snap.est_dot = estimator_rhs(plan_.law, snap.est, snap.mixed);
    return snap;
}

void Simulation::rhs(double t, std::span<const double> s, std::span<double> ds) const {
    const Snapshot snap = evaluate(t, s);
    if (snap.obs_dot) {
        const ObserverState& d = *snap.obs_dot;
        put(layout_.view(ds, "x"), d.x);
        put(layout_.view(ds, "chi"), d.chi);
        put(layout_.view(ds, "P"), d.P);
        put(layout_.view(ds, "Omega"), d.Omega.data());
        put(layout_.view(ds, "PhiK"), d.PhiK.data());
        put(layout_.view(ds, "delta_f"), d.delta_f);
    }
    put(layout_.view(ds, "Y"), snap.ext_dot.Y);
    put(layout_.view(ds, "Phi"), snap.ext_dot.Phi.data());
    put(layout_.view(ds, "W"), snap.ext_dot.W);
    put(layout_.view(ds, "theta_hat"), snap.est_dot.theta_hat);
    if (layout_.contains("kappa_hat")) layout_.view(ds, "kappa_hat")[0] = snap.est_dot.kappa_hat;
    layout_.view(ds, "delta_jacobi")[0] = snap.mixed.delta_dot;
}

std::vector<std::string> Simulation::columns() const {
    std::vector<std::string> c{"t"};
    auto indexed = [&](const std::string& base, std::size_t count) {
        for (std::size_t i = 1; i <= count; ++i) c.push_back(base + "_" + std::to_string(i));
    };
    indexed("theta_hat", n_);
    indexed("theta_tilde", n_);
    c.insert(c.end(), {"kappa_hat", "kappa_tilde", "delta", "delta_dot"});
    indexed("scalW", n_);
    c.insert(c.end(), {"ineq_lhs", "ineq_rhs", "delta_jacobi"});
    indexed("phi", n_);
    indexed("scalY", n_);
    if (nx_ > 0) {
        indexed("x", nx_);
        indexed("xhat", nx_);
        c.insert(c.end(), {"xtilde_norm", "e_residual", "z_residual"});
    }
    return c;
}

std::vector<double> Simulation::sample(double t, std::span<const double> s) const {
    const Snapshot snap = evaluate(t, s);
    const Vec& theta = plan_.scenario.theta();
    const MixedSignals& m = snap.mixed;
    std::vector<double> row{t};
    row.insert(row.end(), snap.est.theta_hat.begin(), snap.est.theta_hat.end());
    for (std::size_t i = 0; i < n_; ++i) row.push_back(snap.est.theta_hat[i] - theta[i]);

    if (const auto* a = std::get_if<AveragingLaw>(&plan_.law)) {
        row.push_back(snap.est.kappa_hat);
        row.push_back(m.delta > 0.0 ? snap.est.kappa_hat - 1.0 / m.delta : kNaN);
        row.push_back(m.delta);
        row.push_back(m.delta_dot);
        row.insert(row.end(), m.scalW.begin(), m.scalW.end());
        row.push_back(inequality_lhs(a->gamma, m.delta, m.delta_dot, snap.est.kappa_hat));
        row.push_back(a->eta_reference * m.delta);
    } else {
        row.push_back(kNaN);
        row.push_back(kNaN);
        row.push_back(m.delta);
        row.push_back(m.delta_dot);
        row.insert(row.end(), m.scalW.begin(), m.scalW.end());
        row.push_back(kNaN);
        row.push_back(kNaN);
    }
    row.push_back(layout_.view(s, "delta_jacobi")[0]);
    row.insert(row.end(), snap.phi.begin(), snap.phi.end());
    row.insert(row.end(), m.scalY.begin(), m.scalY.end());

    if (snap.obs) {
        const auto& p = std::get<PlantSpec>(plan_.scenario.source);
        const ObserverState& obs = *snap.obs;
        const Vec xhat = reconstruct_state(obs, snap.est.theta_hat);
        row.insert(row.end(), obs.x.begin(), obs.x.end());
        row.insert(row.end(), xhat.begin(), xhat.end());
        row.push_back(norm2(xhat - obs.x));
        const Vec e = observation_error(obs, theta);
        const Vec predicted = obs.PhiK * (p.chi0 - p.x0) + obs.delta_f;
        double e_res = 0.0;
        for (std::size_t i = 0; i < nx_; ++i) e_res = std::max(e_res, std::abs(e[i] - predicted[i]));
        row.push_back(e_res);
        row.push_back(std::abs(snap.y - dot(snap.phi, theta) - snap.w));
    }
    return row;
}

SimulationResult Simulation::run() const {
    return run_segment(initial_state(), 0.0, plan_.scenario.horizon, plan_.scenario.sample_every);
}

SimulationResult Simulation::run_segment(SystemState s, double t0, double duration, double sample_every) const {
    SimulationResult result;
    result.trace.columns = columns();
    const Rhs f = [this](double t, std::span<const double> x, std::span<double> dx) { rhs(t, x, dx); };
    const Sampler sampler = [&](double t, std::span<const double> x) { result.trace.rows.push_back(sample(t, x)); };
    const IntegrationOutcome outcome =
        integrate(f, s, t0, duration, plan_.scenario.step, sample_every, sampler, &layout_);
    result.failure = outcome.failure;
    result.final_state = std::move(s);
    return result;
}

SimulationResult simulate(const RunPlan& plan) { return Simulation(plan).run(); }

}  // namespace avgdrem
