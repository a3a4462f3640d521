#include "avgdrem/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "avgdrem/errors.hpp"

namespace avgdrem {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json nums(const std::vector<double>& v) {
    nlohmann::json out = nlohmann::json::array();
    for (double x : v) out.push_back(num(x));
    return out;
}

double abs_max(const std::vector<double>& v, std::size_t from = 0) {
    double m = 0.0;
    for (std::size_t k = from; k < v.size(); ++k) m = std::max(m, std::abs(v[k]));
    return m;
}

std::string indexed(const char* base, std::size_t i) { return fmt::format("{}_{}", base, i + 1); }

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace

std::vector<RunPlan> plans_for(const ScenarioSpec& spec, LawSelection law) {
    std::vector<RunPlan> plans;
    if (law != LawSelection::averaging) {
        if (!spec.gradient) throw ParameterError(spec.name + ": no gradient law configured");
        plans.push_back({spec, *spec.gradient});
    }
    if (law != LawSelection::gradient) {
        if (!spec.averaging) throw ParameterError(spec.name + ": no averaging law configured");
        plans.push_back({spec, *spec.averaging});
    }
    return plans;
}

std::vector<SimulationResult> run_sweep(const std::vector<RunPlan>& plans) {
    std::vector<SimulationResult> out(plans.size());
    std::vector<std::exception_ptr> errors(plans.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(plans.size()); ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            out[k] = simulate(plans[k]);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

std::vector<SimulationResult> run_sweep_serial(const std::vector<RunPlan>& plans) {
    std::vector<SimulationResult> out;
    out.reserve(plans.size());
    for (const auto& p : plans) out.push_back(simulate(p));
    return out;
}

nlohmann::json summarize(const RunPlan& plan, const SimulationResult& result, const ExcitationReport& report) {
    const ScenarioSpec& spec = plan.scenario;
    const Trace& tr = result.trace;
    const std::size_t n = spec.regression_dim();
    const Vec& theta = spec.theta();
    const bool averaging = std::holds_alternative<AveragingLaw>(plan.law);

    nlohmann::json j;
    j["scenario"] = spec.name;
    j["law"] = law_name(plan.law);
    j["step"] = spec.step;
    j["horizon"] = spec.horizon;
    j["samples"] = tr.size();
    j["status"] = result.failure ? "failed" : "ok";
    j["failure"] = result.failure ? nlohmann::json{{"t", result.failure->t}, {"block", result.failure->block}}
                                  : nlohmann::json(nullptr);
    if (tr.empty()) return j;

    const std::vector<double> t = tr.column("t");
    const std::vector<double> delta = tr.column("delta");

    std::vector<double> terminal(n), sup(n), w_max(n), mix_res(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto tt = tr.column(indexed("theta_tilde", i));
        terminal[i] = tt.back();
        sup[i] = abs_max(tt);
        w_max[i] = abs_max(tr.column(indexed("scalW", i)));
        const auto sy = tr.column(indexed("scalY", i));
        const auto sw = tr.column(indexed("scalW", i));
        for (std::size_t k = 0; k < t.size(); ++k)
            mix_res[i] = std::max(mix_res[i], std::abs(sy[k] - delta[k] * theta[i] - sw[k]));
    }
    j["terminal_theta_tilde"] = nums(terminal);
    j["sup_theta_tilde"] = nums(sup);
    j["W_max"] = nums(w_max);
    j["c_W"] = nums(report.c2_sup);
    j["T_detect"] = report.T_detect ? nlohmann::json(*report.T_detect) : nlohmann::json(nullptr);
    j["delta_lb"] = num(report.delta_lb);
    j["delta_ub"] = num(report.delta_ub);
    j["eta_max"] = report.eta_max ? num(*report.eta_max) : nlohmann::json(nullptr);
    j["mixing_residual_max"] = nums(mix_res);

    const auto dj = tr.column("delta_jacobi");
    double jac = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) jac = std::max(jac, std::abs(dj[k] - delta[k]));
    j["jacobi_deviation_max"] = jac;

    j["kappa_tilde_T"] = nullptr;
    j["s1_bound"] = nullptr;
    if (averaging && report.T_detect) {
        const double kt = tr.at("kappa_tilde", *report.T_detect);
        j["kappa_tilde_T"] = num(kt);
        std::vector<double> s1(n);
        for (std::size_t i = 0; i < n; ++i)
            s1[i] = (std::abs(kt) + 1.0 / report.delta_lb) * w_max[i] + report.delta_ub * std::abs(theta[i]) * std::abs(kt);
        j["s1_bound"] = nums(s1);
    }

    if (spec.is_observer()) {
        const auto xn = tr.column("xtilde_norm");
        const std::size_t tail = std::max<std::size_t>(1, xn.size() / 10);
        j["xtilde_final"] = num(xn.back());
        j["xtilde_terminal"] = num(abs_max(xn, xn.size() - tail));
        j["error_identity_max"] = num(abs_max(tr.column("e_residual")));
        j["regression_residual_max"] = num(abs_max(tr.column("z_residual")));
        const PlantBound b = plant_bound(spec);
        j["delta_max"] = b.delta_max;
        j["epsilon_x"] = b.epsilon_x;
    }
    return j;
}

bool ExperimentResult::ok() const {
    return std::all_of(runs.begin(), runs.end(), [](const LawRun& r) { return !r.result.failure; });
}

ExperimentResult run_experiment(const ScenarioSpec& spec, LawSelection law, const std::filesystem::path& out_dir) {
    validate(spec);
    const std::vector<RunPlan> plans = plans_for(spec, law);
    std::filesystem::create_directories(out_dir);
    std::vector<SimulationResult> results = run_sweep(plans);

    ExperimentResult ex{spec, {}};
    for (std::size_t i = 0; i < plans.size(); ++i) {
        LawRun run;
        run.law = law_name(plans[i].law);
        run.result = std::move(results[i]);
        const std::string stem = spec.name + "_" + run.law;
        run.csv_path = out_dir / (stem + ".csv");
        run.report_path = out_dir / (stem + "_report.json");
        run.summary_path = out_dir / (stem + "_summary.json");
        write_csv(run.result.trace, run.csv_path);
        if (run.result.trace.size() >= 2) run.report = analyze_trace(run.result.trace);
        run.summary = summarize(plans[i], run.result, run.report);
        nlohmann::json report_json = run.report;
        write_json(report_json, run.report_path);
        write_json(run.summary, run.summary_path);
        ex.runs.push_back(std::move(run));
    }
    return ex;
}

ExperimentResult run_experiment(const RunConfig& cfg) {
    return run_experiment(load_config(cfg), cfg.law, cfg.out_dir);
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ParameterError("least_squares_slope: need >= 2 paired samples");
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxy += (x[k] - mx) * (y[k] - my);
        sxx += (x[k] - mx) * (x[k] - mx);
    }
    if (sxx == 0.0) throw ParameterError("least_squares_slope: x has no spread");
    return sxy / sxx;
}

KappaProbe kappa_decay_probe(const ScenarioSpec& spec, const AveragingLaw& law, double t_start, double duration) {
    if (t_start < 0.0 || !(duration > 0.0)) throw ParameterError("kappa_decay_probe: bad interval");
    ScenarioSpec s = spec;
    const double h = s.step;
    // align both ends with the step grid
    const double start = std::round(t_start / h) * h;
    const double span = std::max(1.0, std::ceil(duration / h - 1e-9)) * h;
    const Simulation sim(RunPlan{s, law});

    SystemState state = sim.initial_state();
    if (start > 0.0) {
        const SimulationResult head = sim.run_segment(state, 0.0, start, start);
        if (head.failure) throw SolverError(fmt::format("kappa_decay_probe: integration failed at t = {}", head.failure->t));
        state = head.final_state;
    }
    sim.layout().view(std::span<double>(state), "kappa_hat")[0] = law.kappa0;

    const SimulationResult tail = sim.run_segment(state, start, span, h);
    if (tail.failure) throw SolverError(fmt::format("kappa_decay_probe: integration failed at t = {}", tail.failure->t));

    KappaProbe p;
    const auto t = tail.trace.column("t");
    const auto kt = tail.trace.column("kappa_tilde");
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (!std::isfinite(kt[k]) || kt[k] == 0.0) continue;
        p.t.push_back(t[k]);
        p.log_abs_kappa_tilde.push_back(std::log(std::abs(kt[k])));
    }
    p.kappa_tilde_start = kt.empty() ? kNaN : kt.front();
    p.slope = least_squares_slope(p.t, p.log_abs_kappa_tilde);
    return p;
}

PlantBound plant_bound(const ScenarioSpec& spec) {
    if (!spec.is_observer()) throw ParameterError(spec.name + ": bound needs a plant scenario");
    const PlantSpec& plant = std::get<PlantSpec>(spec.source);
    BoundSettings b;
    if (spec.bound) {
        b = *spec.bound;
    } else {
        b.q = Mat::identity(plant.n());
        b.c = 0.5 * symmetric_eigenvalues(b.q).front();
    }
    PlantBound out;
    out.c = b.c;
    out.delta_max = delta_max_bound(plant);
    out.epsilon_x = epsilon_x_bound(plant, out.delta_max, b.q, b.c);
    return out;
}

}  // namespace avgdrem
