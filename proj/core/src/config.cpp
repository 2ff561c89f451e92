#include "formbound/config.hpp"

#include <cmath>

#include "formbound/constants.hpp"
#include "formbound/errors.hpp"

namespace formbound {

std::string drift_kind_name(DriftKind k) {
    switch (k) {
        case DriftKind::hardy: return "hardy";
        case DriftKind::smooth_trig: return "smooth-trig";
        case DriftKind::file: return "file";
    }
    return "hardy";
}

DriftKind drift_kind_from_name(const std::string& s) {
    if (s == "hardy") return DriftKind::hardy;
    if (s == "smooth-trig") return DriftKind::smooth_trig;
    if (s == "file") return DriftKind::file;
    throw ConfigError("unknown drift kind '" + s + "'");
}

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig cfg;
    DriftSpec hardy;
    hardy.name = "hardy02";
    hardy.kind = DriftKind::hardy;
    hardy.c = 0.2;
    hardy.lambda = 1.0;
    hardy.mollification = {1e6, 0.0};  // indicator inactive at desk scale
    DriftSpec trig;
    trig.name = "trig05";
    trig.kind = DriftKind::smooth_trig;
    trig.amplitude = 0.5;
    trig.lambda = 1.0;
    cfg.drifts = {hardy, trig};
    return cfg;
}

namespace {

toml::Table drift_to_toml(const DriftSpec& s) {
    toml::Table t;
    t.emplace("name", s.name);
    t.emplace("kind", drift_kind_name(s.kind));
    t.emplace("lambda", s.lambda);
    t.emplace("cutoff", s.mollification.cutoff);
    t.emplace("epsilon", s.mollification.epsilon);
    switch (s.kind) {
        case DriftKind::hardy: t.emplace("c", s.c); break;
        case DriftKind::smooth_trig: t.emplace("amplitude", s.amplitude); break;
        case DriftKind::file: {
            toml::Array paths;
            for (const auto& p : s.paths) paths.emplace_back(p);
            t.emplace("paths", std::move(paths));
            break;
        }
    }
    if (s.delta_claimed) t.emplace("delta_claimed", *s.delta_claimed);
    return t;
}

DriftSpec drift_from_toml(const toml::Table& t) {
    DriftSpec s;
    s.name = toml::get_string(t, "name", s.name);
    s.kind = drift_kind_from_name(toml::get_string(t, "kind", "hardy"));
    s.c = toml::get_double(t, "c", s.c);
    s.amplitude = toml::get_double(t, "amplitude", s.amplitude);
    s.lambda = toml::get_double(t, "lambda", s.lambda);
    s.mollification.cutoff = toml::get_double(t, "cutoff", 0.0);
    s.mollification.epsilon = toml::get_double(t, "epsilon", 0.0);
    if (const toml::Value* v = toml::find(t, "paths"))
        for (const auto& e : v->as_array()) s.paths.push_back(e.as_string());
    if (const toml::Value* v = toml::find(t, "delta_claimed"))
        s.delta_claimed = v->as_double();
    return s;
}

}  // namespace

toml::Table ExperimentConfig::to_toml() const {
    toml::Table root;
    root.emplace("seed", static_cast<std::int64_t>(seed));
    root.emplace("threads", threads);
    root.emplace("out", out_dir);

    toml::Table g;
    g.emplace("d", grid.d);
    g.emplace("n", grid.n);
    g.emplace("L", grid.L);
    root.emplace("grid", std::move(g));

    toml::Table tl;
    tl.emplace("neumann_tol", tol.neumann_tol);
    tl.emplace("neumann_max_terms", tol.neumann_max_terms);
    tl.emplace("dealias", tol.rule == ProductRule::dealias32);
    tl.emplace("quad_rtol", quad_rtol);
    root.emplace("tolerances", std::move(tl));

    toml::Table on;
    on.emplace("probes", opnorm.probes);
    on.emplace("iters", opnorm.iters);
    on.emplace("rtol", opnorm.rtol);
    root.emplace("opnorm", std::move(on));

    toml::Table fb;
    fb.emplace("probes", form_bound.probes);
    fb.emplace("iters", form_bound.iters);
    fb.emplace("rtol", form_bound.rtol);
    root.emplace("formbound", std::move(fb));

    toml::Table sg;
    sg.emplace("t", semigroup.t);
    sg.emplace("steps", semigroup.steps);
    toml::Array tc, te;
    for (double v : semigroup.trotter_cutoffs) tc.emplace_back(v);
    for (double v : semigroup.trotter_epsilons) te.emplace_back(v);
    sg.emplace("trotter_cutoffs", std::move(tc));
    sg.emplace("trotter_epsilons", std::move(te));
    root.emplace("semigroup", std::move(sg));

    toml::Table rs;
    toml::Array pa, ma, sw;
    for (double v : p_list) pa.emplace_back(v);
    for (double v : mu_list) ma.emplace_back(v);
    for (double v : sweep_values) sw.emplace_back(v);
    rs.emplace("p", std::move(pa));
    rs.emplace("mu", std::move(ma));
    rs.emplace("r", r);
    rs.emplace("q", q);
    rs.emplace("sweep_values", std::move(sw));
    root.emplace("resolvent", std::move(rs));

    toml::Table cal;
    toml::Array cg;
    for (double v : calibration_grid) cg.emplace_back(v);
    cal.emplace("mu_grid", std::move(cg));
    root.emplace("calibration", std::move(cal));

    toml::Table su;
    toml::Array sa;
    for (const auto& s : suites) sa.emplace_back(s);
    su.emplace("checks", std::move(sa));
    root.emplace("suite", std::move(su));

    toml::Array da;
    for (const auto& s : drifts) da.emplace_back(drift_to_toml(s));
    root.emplace("drift", std::move(da));
    return root;
}

ExperimentConfig ExperimentConfig::from_toml(const toml::Table& t) {
    ExperimentConfig cfg;
    cfg.drifts.clear();
    cfg.seed = static_cast<std::uint64_t>(toml::get_int(t, "seed", 42));
    cfg.threads = static_cast<int>(toml::get_int(t, "threads", 1));
    cfg.out_dir = toml::get_string(t, "out", "out");

    if (const toml::Value* v = toml::find(t, "grid")) {
        const toml::Table& g = v->as_table();
        cfg.grid.d = static_cast<int>(toml::get_int(g, "d", 3));
        cfg.grid.n = static_cast<int>(toml::get_int(g, "n", 32));
        cfg.grid.L = toml::get_double(g, "L", 10.0);
    }
    if (const toml::Value* v = toml::find(t, "tolerances")) {
        const toml::Table& g = v->as_table();
        cfg.tol.neumann_tol = toml::get_double(g, "neumann_tol", 1e-10);
        cfg.tol.neumann_max_terms =
            static_cast<int>(toml::get_int(g, "neumann_max_terms", 200));
        cfg.tol.rule = toml::get_bool(g, "dealias", true) ? ProductRule::dealias32
                                                          : ProductRule::pointwise;
        cfg.quad_rtol = toml::get_double(g, "quad_rtol", 1e-8);
    }
    if (const toml::Value* v = toml::find(t, "opnorm")) {
        const toml::Table& g = v->as_table();
        cfg.opnorm.probes = static_cast<int>(toml::get_int(g, "probes", 4));
        cfg.opnorm.iters = static_cast<int>(toml::get_int(g, "iters", 20));
        cfg.opnorm.rtol = toml::get_double(g, "rtol", 1e-4);
    }
    if (const toml::Value* v = toml::find(t, "formbound")) {
        const toml::Table& g = v->as_table();
        cfg.form_bound.probes = static_cast<int>(toml::get_int(g, "probes", 4));
        cfg.form_bound.iters = static_cast<int>(toml::get_int(g, "iters", 150));
        cfg.form_bound.rtol = toml::get_double(g, "rtol", 1e-10);
    }
    if (const toml::Value* v = toml::find(t, "semigroup")) {
        const toml::Table& g = v->as_table();
        cfg.semigroup.t = toml::get_double(g, "t", 0.1);
        cfg.semigroup.steps = static_cast<int>(toml::get_int(g, "steps", 32));
        cfg.semigroup.trotter_cutoffs =
            toml::get_double_array(g, "trotter_cutoffs", cfg.semigroup.trotter_cutoffs);
        cfg.semigroup.trotter_epsilons =
            toml::get_double_array(g, "trotter_epsilons", cfg.semigroup.trotter_epsilons);
    }
    if (const toml::Value* v = toml::find(t, "resolvent")) {
        const toml::Table& g = v->as_table();
        cfg.p_list = toml::get_double_array(g, "p", cfg.p_list);
        cfg.mu_list = toml::get_double_array(g, "mu", cfg.mu_list);
        cfg.r = toml::get_double(g, "r", cfg.r);
        cfg.q = toml::get_double(g, "q", cfg.q);
        cfg.sweep_values = toml::get_double_array(g, "sweep_values", {});
    }
    if (const toml::Value* v = toml::find(t, "calibration")) {
        cfg.calibration_grid =
            toml::get_double_array(v->as_table(), "mu_grid", cfg.calibration_grid);
    }
    if (const toml::Value* v = toml::find(t, "suite")) {
        cfg.suites.clear();
        if (const toml::Value* c = toml::find(v->as_table(), "checks"))
            for (const auto& e : c->as_array()) cfg.suites.push_back(e.as_string());
        if (cfg.suites.empty()) cfg.suites = {"all"};
    }
    if (const toml::Value* v = toml::find(t, "drift"))
        for (const auto& e : v->as_array()) cfg.drifts.push_back(drift_from_toml(e.as_table()));
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    return from_toml(toml::parse_file(path));
}

void ExperimentConfig::validate() const {
    if (grid.d < 3) throw ConfigError("grid.d must be >= 3");
    if (grid.n < 4 || grid.n % 2) throw ConfigError("grid.n must be even and >= 4");
    if (!(grid.L > 0.0)) throw ConfigError("grid.L must be positive");
    if (!(tol.neumann_tol > 0.0)) throw ConfigError("neumann_tol must be positive");
    if (tol.neumann_max_terms < 1) throw ConfigError("neumann_max_terms must be >= 1");
    if (!(quad_rtol > 0.0)) throw ConfigError("quad_rtol must be positive");
    if (opnorm.probes < 1 || opnorm.iters < 1)
        throw ConfigError("opnorm probes/iters must be >= 1");
    if (form_bound.probes < 1 || form_bound.iters < 1)
        throw ConfigError("formbound probes/iters must be >= 1");
    if (!(semigroup.t > 0.0)) throw ConfigError("semigroup.t must be positive");
    if (semigroup.steps < 1) throw ConfigError("semigroup.steps must be >= 1");
    if (semigroup.trotter_cutoffs.size() != semigroup.trotter_epsilons.size())
        throw ConfigError("trotter cutoff/epsilon schedules differ in length");
    for (double p : p_list)
        if (!(p >= 2.0)) throw ConfigError("every p must be >= 2");
    for (double mu : mu_list)
        if (!(mu > 0.0)) throw ConfigError("every mu must be positive");
    if (!(r >= 2.0)) throw ConfigError("r must be >= 2");
    if (!(q > r)) throw ConfigError("q must exceed r");
    for (std::size_t i = 1; i < calibration_grid.size(); ++i)
        if (!(calibration_grid[i] > calibration_grid[i - 1]))
            throw ConfigError("calibration mu_grid must ascend");
    for (const auto& s : drifts) {
        if (!(s.lambda > 0.0)) throw ConfigError("drift '" + s.name + "': lambda must be positive");
        if (s.kind == DriftKind::hardy) {
            if (!(s.c > 0.0)) throw ConfigError("drift '" + s.name + "': c must be positive");
            const double delta = s.delta_claimed.value_or(
                4.0 * s.c * s.c / ((grid.d - 2.0) * (grid.d - 2.0)));
            const PRange range = admissible_p_range(std::min(delta, 0.999999999999));
            if (delta >= 1.0) throw ConfigError("drift '" + s.name + "': delta_claimed >= 1");
            for (double p : p_list)
                if (!range.contains(p))
                    throw ConfigError("drift '" + s.name + "': p outside [2, 2/sqrt(delta))");
        }
        if (s.kind == DriftKind::file &&
            static_cast<int>(s.paths.size()) != grid.d)
            throw ConfigError("drift '" + s.name + "': need one path per component");
        if (s.mollification.epsilon < 0.0)
            throw ConfigError("drift '" + s.name + "': epsilon must be >= 0");
    }
}

}  // namespace formbound
