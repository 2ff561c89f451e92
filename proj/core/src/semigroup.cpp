#include "formbound/semigroup.hpp"

#include <cmath>

#include "formbound/errors.hpp"
#include "formbound/norms.hpp"

namespace formbound {

SemigroupStepper make_stepper(std::shared_ptr<const DriftField> drift, double p, double t,
                              int steps, Tolerances tol, double mu0) {
    if (!(t > 0.0)) throw InvalidParameter("make_stepper: t must be positive");
    if (steps <= 0) steps = std::max(16, static_cast<int>(std::ceil(4.0 * t * mu0)));
    const double mu_eff = steps / t;
    if (mu0 > 0.0 && !(mu_eff > mu0))
        throw InvalidParameter("make_stepper: steps/t must exceed calibrated mu0");
    SemigroupStepper st;
    st.prob = make_problem(std::move(drift), mu_eff, p, tol);
    st.t = t;
    st.steps = steps;
    return st;
}

SemigroupRun semigroup_apply(const SemigroupStepper& st, const ScalarField& f) {
    SemigroupRun run{f, {}, false};
    const double p = st.prob->p();
    const double mu_eff = st.prob->mu();
    const double dt = st.t / st.steps;
    run.series.push_back({0.0, lp_norm(f, p), min_value(f), max_value(f)});
    for (int j = 0; j < st.steps; ++j) {
        ThetaResult step = theta_apply(*st.prob, run.u);
        run.u = std::move(step.u);
        run.u *= mu_eff;
        if (step.neumann.diverged) run.diverged = true;
        run.series.push_back(
            {(j + 1) * dt, lp_norm(run.u, p), min_value(run.u), max_value(run.u)});
    }
    return run;
}

double check_positivity(const SemigroupStepper& st, const ScalarField& f) {
    if (min_value(f) < 0.0)
        throw InvalidParameter("check_positivity: f must be nonnegative");
    return min_value(semigroup_apply(st, f).u);
}

double check_linf_contraction(const SemigroupStepper& st, const ScalarField& f) {
    const double fn = max_abs(f);
    if (fn == 0.0) return 0.0;
    return max_abs(semigroup_apply(st, f).u) / fn;
}

double fit_growth_exponent(const SemigroupRun& run) {
    const std::size_t m = run.series.size();
    if (m < 4) throw InvalidParameter("fit_growth_exponent: time series too short");
    const std::size_t lo = m / 2;  // drop the high-mode transient
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    std::size_t cnt = 0;
    for (std::size_t j = lo; j < m; ++j) {
        const double lp = run.series[j].lp;
        if (lp <= 0.0) continue;
        const double x = run.series[j].t;
        const double y = std::log(lp);
        st += x;
        sy += y;
        stt += x * x;
        sty += x * y;
        ++cnt;
    }
    if (cnt < 2) return 0.0;
    const double denom = cnt * stt - st * st;
    return denom == 0.0 ? 0.0 : (cnt * sty - st * sy) / denom;
}

std::vector<double> trotter_defects(const GridPtr& grid, const DriftSpec& base,
                                    const std::vector<Mollification>& levels, double p,
                                    double t, int steps, Tolerances tol,
                                    const ScalarField& f) {
    if (levels.size() < 2)
        throw InvalidParameter("trotter_defects: need at least two levels");
    std::vector<ScalarField> outputs;
    outputs.reserve(levels.size());
    for (const auto& level : levels) {
        DriftSpec spec = base;
        spec.mollification = level;
        auto drift = std::make_shared<const DriftField>(make_drift(grid, spec));
        outputs.push_back(
            semigroup_apply(make_stepper(drift, p, t, steps, tol), f).u);
    }
    std::vector<double> defects;
    const ScalarField& ref = outputs.back();
    const double fn = lp_norm(f, p);
    for (const auto& u : outputs) {
        ScalarField d = u;
        d -= ref;
        defects.push_back(lp_norm(d, p) / fn);
    }
    return defects;
}

}  // namespace formbound
