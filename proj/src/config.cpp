#include "avgdrem/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#ifndef AVGDREM_SCENARIO_DIR
#define AVGDREM_SCENARIO_DIR "scenarios"
#endif

namespace avgdrem {

namespace {

class Reader {
public:
    explicit Reader(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
        const auto mark = node.Mark();
        if (mark.is_null()) throw ConfigError(fmt::format("{}: {}", origin_, msg));
        throw ConfigError(fmt::format("{}:{}: {}", origin_, mark.line + 1, msg));
    }

    void expect_keys(const YAML::Node& map, const std::string& where, std::set<std::string> allowed) const {
        if (!map.IsMap()) fail(map, where + " must be a mapping");
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.contains(key)) fail(kv.first, fmt::format("unknown key '{}' in {}", key, where));
        }
    }

    YAML::Node required(const YAML::Node& map, const std::string& key, const std::string& where) const {
        const YAML::Node v = map[key];
        if (!v) fail(map, fmt::format("{} is missing required key '{}'", where, key));
        return v;
    }

    double number(const YAML::Node& node, const std::string& field) const {
        if (!node.IsScalar()) fail(node, field + " must be a number");
        try {
            return node.as<double>();
        } catch (const YAML::Exception&) {
            fail(node, fmt::format("{} must be a number, got '{}'", field, node.Scalar()));
        }
    }

    Vec vector(const YAML::Node& node, const std::string& field) const {
        if (!node.IsSequence()) fail(node, field + " must be a list of numbers");
        Vec v;
        for (std::size_t i = 0; i < node.size(); ++i) v.push_back(number(node[i], fmt::format("{}[{}]", field, i)));
        return v;
    }

    Mat matrix(const YAML::Node& node, const std::string& field) const {
        if (!node.IsSequence() || node.size() == 0) fail(node, field + " must be a non-empty list of rows");
        std::vector<Vec> rows;
        for (std::size_t i = 0; i < node.size(); ++i) rows.push_back(vector(node[i], fmt::format("{}[{}]", field, i)));
        Mat m(rows.size(), rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols()) fail(node[i], field + " has rows of unequal length");
            for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    SignalExpr signal(const YAML::Node& node, const std::string& field) const {
        if (node.IsScalar()) return SignalExpr::constant(number(node, field));
        if (!node.IsMap() || node.size() != 1) {
            fail(node, field + " must be a number or a single-key mapping (constant, sin, exp_decay, sum, scale)");
        }
        const auto kind = node.begin()->first.as<std::string>();
        const YAML::Node body = node.begin()->second;
        const std::string where = field + "." + kind;
        if (kind == "constant") return SignalExpr::constant(number(body, where));
        if (kind == "sin") {
            expect_keys(body, where, {"amplitude", "frequency", "phase"});
            const double amp = body["amplitude"] ? number(body["amplitude"], where + ".amplitude") : 1.0;
            const double freq = body["frequency"] ? number(body["frequency"], where + ".frequency") : 1.0;
            const double phase = body["phase"] ? number(body["phase"], where + ".phase") : 0.0;
            return SignalExpr::sine(amp, freq, phase);
        }
        if (kind == "exp_decay") {
            if (body.IsScalar()) return SignalExpr::exp_decay(number(body, where));
            expect_keys(body, where, {"rate"});
            return SignalExpr::exp_decay(number(required(body, "rate", where), where + ".rate"));
        }
        if (kind == "sum") {
            if (!body.IsSequence()) fail(body, where + " must be a list");
            std::vector<SignalExpr> terms;
            for (std::size_t i = 0; i < body.size(); ++i) terms.push_back(signal(body[i], fmt::format("{}[{}]", where, i)));
            return SignalExpr::sum(std::move(terms));
        }
        if (kind == "scale") {
            expect_keys(body, where, {"factor", "signal"});
            return SignalExpr::scale(number(required(body, "factor", where), where + ".factor"),
                                     signal(required(body, "signal", where), where + ".signal"));
        }
        fail(node, fmt::format("unknown signal kind '{}' in {}", kind, field));
    }

    std::vector<SignalExpr> signals(const YAML::Node& node, const std::string& field) const {
        if (!node.IsSequence()) fail(node, field + " must be a list of signals");
        std::vector<SignalExpr> out;
        for (std::size_t i = 0; i < node.size(); ++i) out.push_back(signal(node[i], fmt::format("{}[{}]", field, i)));
        return out;
    }

    RegressionProblem regression(const YAML::Node& node) const {
        expect_keys(node, "regression", {"regressor", "theta", "disturbance"});
        RegressionProblem r;
        r.regressor = signals(required(node, "regressor", "regression"), "regression.regressor");
        r.theta = vector(required(node, "theta", "regression"), "regression.theta");
        r.disturbance = node["disturbance"] ? signal(node["disturbance"], "regression.disturbance")
                                            : SignalExpr::constant(0.0);
        if (r.theta.size() != r.regressor.size()) fail(node["theta"], "regression.theta length must match regressor");
        return r;
    }

    PlantSpec plant(const YAML::Node& node) const {
        expect_keys(node, "plant", {"A", "C", "K", "phi_y", "phi_u", "G", "theta", "delta", "u", "x0", "chi0"});
        PlantSpec p;
        p.A = matrix(required(node, "A", "plant"), "plant.A");
        p.C = matrix(required(node, "C", "plant"), "plant.C");
        p.K = matrix(required(node, "K", "plant"), "plant.K");
        p.theta = vector(required(node, "theta", "plant"), "plant.theta");
        const std::size_t n = p.A.rows();
        p.delta = node["delta"] ? signals(node["delta"], "plant.delta")
                                : std::vector<SignalExpr>(p.C.rows(), SignalExpr::constant(0.0));
        p.u = node["u"] ? signals(node["u"], "plant.u") : std::vector<SignalExpr>{};
        p.x0 = node["x0"] ? vector(node["x0"], "plant.x0") : Vec(n, 0.0);
        p.chi0 = node["chi0"] ? vector(node["chi0"], "plant.chi0") : Vec(n, 0.0);

        // phi(y, u) = phi_y y + phi_u u; G(y, u) = G (constant).
        const Mat phi_y = node["phi_y"] ? matrix(node["phi_y"], "plant.phi_y") : Mat(n, p.C.rows());
        const Mat phi_u = node["phi_u"] ? matrix(node["phi_u"], "plant.phi_u") : Mat(n, p.u.size());
        const Mat g = matrix(required(node, "G", "plant"), "plant.G");
        if (phi_y.rows() != n || phi_y.cols() != p.C.rows()) fail(node["phi_y"], "plant.phi_y must be n x p");
        if (phi_u.rows() != n || phi_u.cols() != p.u.size()) fail(node["phi_u"], "plant.phi_u must be n x m");
        if (g.rows() != n || g.cols() != p.theta.size()) fail(node["G"], "plant.G must be n x q");
        p.phi_map = [phi_y, phi_u](const Vec& y, const Vec& u) { return phi_y * y + phi_u * u; };
        p.G_map = [g](const Vec&, const Vec&) { return g; };
        return p;
    }

    ExtensionScheme extension(const YAML::Node& node) const {
        const auto kind = required(node, "kind", "extension").as<std::string>();
        if (kind == "kreisselmeier") {
            expect_keys(node, "extension", {"kind", "l"});
            return {ExtensionScheme::Kind::kreisselmeier, number(required(node, "l", "extension"), "extension.l")};
        }
        if (kind == "fe_decay") {
            expect_keys(node, "extension", {"kind", "mu"});
            return {ExtensionScheme::Kind::fe_decay, number(required(node, "mu", "extension"), "extension.mu")};
        }
        fail(node["kind"], fmt::format("unknown extension kind '{}' (kreisselmeier | fe_decay)", kind));
    }

    void laws(const YAML::Node& node, ScenarioSpec& spec) const {
        expect_keys(node, "laws", {"gradient", "averaging"});
        if (const YAML::Node g = node["gradient"]) {
            expect_keys(g, "laws.gradient", {"gamma", "theta0"});
            GradientLaw law;
            law.gamma = number(required(g, "gamma", "laws.gradient"), "laws.gradient.gamma");
            if (g["theta0"]) law.theta0 = vector(g["theta0"], "laws.gradient.theta0");
            spec.gradient = law;
        }
        if (const YAML::Node a = node["averaging"]) {
            expect_keys(a, "laws.averaging", {"gamma", "k", "kappa0", "theta0", "eta"});
            AveragingLaw law;
            law.gamma = number(required(a, "gamma", "laws.averaging"), "laws.averaging.gamma");
            law.k = vector(required(a, "k", "laws.averaging"), "laws.averaging.k");
            if (a["kappa0"]) law.kappa0 = number(a["kappa0"], "laws.averaging.kappa0");
            if (a["theta0"]) law.theta0 = vector(a["theta0"], "laws.averaging.theta0");
            if (a["eta"]) law.eta_reference = number(a["eta"], "laws.averaging.eta");
            spec.averaging = law;
        }
    }

    ScenarioSpec scenario(const YAML::Node& root) const {
        expect_keys(root, "scenario", {"name", "regression", "plant", "extension", "laws", "simulation", "bound"});
        ScenarioSpec spec;
        spec.name = root["name"] ? root["name"].as<std::string>() : std::string("scenario");
        if (root["regression"] && root["plant"]) fail(root, "scenario must define either regression or plant, not both");
        if (root["regression"]) {
            spec.source = regression(root["regression"]);
        } else if (root["plant"]) {
            spec.source = plant(root["plant"]);
        } else {
            fail(root, "scenario must define regression or plant");
        }
        spec.extension = extension(required(root, "extension", "scenario"));
        laws(required(root, "laws", "scenario"), spec);

        const YAML::Node sim = required(root, "simulation", "scenario");
        expect_keys(sim, "simulation", {"horizon", "step", "sample_every"});
        spec.horizon = number(required(sim, "horizon", "simulation"), "simulation.horizon");
        spec.step = number(required(sim, "step", "simulation"), "simulation.step");
        spec.sample_every = sim["sample_every"] ? number(sim["sample_every"], "simulation.sample_every") : 0.01;

        if (const YAML::Node b = root["bound"]) {
            if (!spec.is_observer()) fail(b, "bound applies to plant scenarios only");
            expect_keys(b, "bound", {"q", "c"});
            const std::size_t n = std::get<PlantSpec>(spec.source).n();
            BoundSettings bs{b["q"] ? matrix(b["q"], "bound.q") : Mat::identity(n), 0.0};
            bs.c = b["c"] ? number(b["c"], "bound.c") : 0.5 * symmetric_eigenvalues(bs.q).front();
            spec.bound = bs;
        }

        try {
            validate(spec);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(fmt::format("{}: {}", origin_, e.what()));
        } catch (const SolverError& e) {
            throw ConfigError(fmt::format("{}: {}", origin_, e.what()));
        }
        return spec;
    }

private:
    std::string origin_;
};

}  // namespace

std::filesystem::path bundled_scenario_dir() { return AVGDREM_SCENARIO_DIR; }

std::filesystem::path resolve_scenario(const std::string& name_or_path) {
    const std::filesystem::path direct(name_or_path);
    if (std::filesystem::is_regular_file(direct)) return direct;
    for (const auto& candidate : {bundled_scenario_dir() / name_or_path, bundled_scenario_dir() / (name_or_path + ".yaml")}) {
        if (std::filesystem::is_regular_file(candidate)) return candidate;
    }
    throw ConfigError(fmt::format("scenario '{}' not found (not a file, not bundled in {})", name_or_path,
                                  bundled_scenario_dir().string()));
}

ScenarioSpec parse_scenario(const std::string& yaml_text, const std::string& origin) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(fmt::format("{}:{}: parse error: {}", origin, e.mark.line + 1, e.msg));
    }
    return Reader(origin).scenario(root);
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open scenario '{}'", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path.string());
}

LawSelection parse_law_selection(const std::string& s) {
    if (s == "gradient") return LawSelection::gradient;
    if (s == "averaging") return LawSelection::averaging;
    if (s == "both") return LawSelection::both;
    throw ConfigError(fmt::format("unknown law '{}' (gradient | averaging | both)", s));
}

void apply_overrides(ScenarioSpec& spec, const RunConfig& cfg) {
    if (cfg.gamma) {
        if (spec.gradient && cfg.law != LawSelection::averaging) spec.gradient->gamma = *cfg.gamma;
        if (spec.averaging && cfg.law != LawSelection::gradient) spec.averaging->gamma = *cfg.gamma;
    }
    if (cfg.l) {
        if (spec.extension.kind != ExtensionScheme::Kind::kreisselmeier) {
            throw ConfigError("--l applies to the kreisselmeier extension only");
        }
        spec.extension.rate = *cfg.l;
    }
    if (cfg.mu) {
        if (spec.extension.kind != ExtensionScheme::Kind::fe_decay) {
            throw ConfigError("--mu applies to the fe_decay extension only");
        }
        spec.extension.rate = *cfg.mu;
    }
    if (cfg.k && spec.averaging) std::fill(spec.averaging->k.begin(), spec.averaging->k.end(), *cfg.k);
    if (cfg.step) spec.step = *cfg.step;
    if (cfg.horizon) spec.horizon = *cfg.horizon;
    if (cfg.sample_every) spec.sample_every = *cfg.sample_every;
    if (cfg.law == LawSelection::gradient && !spec.gradient) throw ConfigError("scenario has no gradient law");
    if (cfg.law == LawSelection::averaging && !spec.averaging) throw ConfigError("scenario has no averaging law");
    try {
        validate(spec);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

ScenarioSpec load_config(const RunConfig& cfg) {
    ScenarioSpec spec = load_scenario(resolve_scenario(cfg.scenario_path.string()));
    apply_overrides(spec, cfg);
    return spec;
}

}  // namespace avgdrem
