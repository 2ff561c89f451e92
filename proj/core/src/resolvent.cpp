#include "formbound/resolvent.hpp"

#include <cmath>
#include <limits>

#include "formbound/errors.hpp"
#include "formbound/norms.hpp"
#include "formbound/probes.hpp"
#include "formbound/spectral.hpp"

namespace formbound {

ResolventProblem::ResolventProblem(std::shared_ptr<const DriftField> drift, double mu,
                                   double p, Tolerances tol, std::optional<double> r,
                                   std::optional<double> q)
    : drift_(std::move(drift)), mu_(mu), p_(p), r_(r), q_(q), tol_(tol) {
    if (!drift_) throw InvalidParameter("ResolventProblem: null drift");
    if (!(mu_ > 0.0)) throw InvalidParameter("ResolventProblem: mu must be positive");
    if (!(p_ >= 2.0)) throw AdmissibilityError("ResolventProblem: p must be >= 2");
    const PRange range = admissible_p_range(drift_->delta_claimed);  // rejects delta >= 1
    if (!range.contains(p_))
        throw AdmissibilityError("ResolventProblem: p outside [2, 2/sqrt(delta))");
    if (r_.has_value() || q_.has_value()) {
        if (!(r_.has_value() && q_.has_value()))
            throw InvalidParameter("ResolventProblem: r and q must be set together");
        if (!(*r_ >= 2.0 && *r_ < p_ && p_ < *q_))
            throw AdmissibilityError("ResolventProblem: need 2 <= r < p < q");
    }
    w_ = drift_power(*drift_, p_);
    if (tol_.rule == ProductRule::dealias32) {
        fine_ = dealias_fine_grid(grid());
        std::vector<ScalarField> comp;
        for (int j = 0; j < w_.b_pow.dim(); ++j)
            comp.push_back(interpolate(w_.b_pow[j], fine_));
        b_pow_fine_ = VectorField(std::move(comp));
        b_comp_fine_ = interpolate(w_.b_comp, fine_);
    }
}

double ResolventProblem::r() const {
    if (!r_) throw InvalidParameter("ResolventProblem: r not set");
    return *r_;
}

double ResolventProblem::q() const {
    if (!q_) throw InvalidParameter("ResolventProblem: q not set");
    return *q_;
}

ProblemPtr make_problem(std::shared_ptr<const DriftField> drift, double mu, double p,
                        Tolerances tol, std::optional<double> r, std::optional<double> q) {
    return std::make_shared<const ResolventProblem>(std::move(drift), mu, p, tol, r, q);
}

namespace {

bool dealiased(const ResolventProblem& pr) {
    return pr.tol().rule == ProductRule::dealias32;
}

// dot(b_pow, grad v) from the coefficients of v.
ScalarField grad_dot_bpow(const ResolventProblem& pr, const SpectralField& cv) {
    const int d = pr.grid()->dim();
    if (!dealiased(pr)) {
        ScalarField out(pr.grid(), 0.0);
        for (int j = 0; j < d; ++j) {
            const ScalarField gj = fft_inverse(gradient_component_spectral(cv, j));
            const ScalarField& bj = pr.b_pow()[j];
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += bj[i] * gj[i];
        }
        return out;
    }
    ScalarField acc(pr.fine(), 0.0);
    for (int j = 0; j < d; ++j) {
        const ScalarField gj =
            fft_inverse(pad_spectrum(gradient_component_spectral(cv, j), pr.fine()));
        const ScalarField& bj = pr.b_pow_fine()[j];
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += bj[i] * gj[i];
    }
    return project(acc, pr.grid());
}

// Coefficients of -div(b_pow f): the adjoint counterpart of grad_dot_bpow.
SpectralField neg_div_bpow_coeffs(const ResolventProblem& pr, const ScalarField& f) {
    const int d = pr.grid()->dim();
    SpectralField acc(pr.grid());
    if (!dealiased(pr)) {
        for (int j = 0; j < d; ++j) {
            ScalarField qj(pr.grid());
            const ScalarField& bj = pr.b_pow()[j];
            for (std::size_t i = 0; i < qj.size(); ++i) qj[i] = bj[i] * f[i];
            const SpectralField cj = gradient_component_spectral(fft_forward(qj), j);
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] -= cj[i];
        }
        return acc;
    }
    const ScalarField ff = interpolate(f, pr.fine());
    for (int j = 0; j < d; ++j) {
        ScalarField qj(pr.fine());
        const ScalarField& bj = pr.b_pow_fine()[j];
        for (std::size_t i = 0; i < qj.size(); ++i) qj[i] = bj[i] * ff[i];
        const SpectralField cj = gradient_component_spectral(
            truncate_spectrum(fft_forward(qj), pr.grid()), j);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] -= cj[i];
    }
    return acc;
}

// Coefficients of |b|^{1-2/p} f.
SpectralField mult_bcomp_coeffs(const ResolventProblem& pr, const ScalarField& f) {
    if (!dealiased(pr)) {
        ScalarField w(pr.grid());
        const ScalarField& c = pr.b_comp();
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = c[i] * f[i];
        return fft_forward(w);
    }
    ScalarField wf = interpolate(f, pr.fine());
    const ScalarField& cf = pr.b_comp_fine();
    for (std::size_t i = 0; i < wf.size(); ++i) wf[i] *= cf[i];
    return truncate_spectrum(fft_forward(wf), pr.grid());
}

// Physical |b|^{1-2/p} f (final stage of adjoints).
ScalarField mult_bcomp(const ResolventProblem& pr, const ScalarField& f) {
    if (!dealiased(pr)) {
        ScalarField w(pr.grid());
        const ScalarField& c = pr.b_comp();
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = c[i] * f[i];
        return w;
    }
    return fft_inverse(mult_bcomp_coeffs(pr, f));
}

void scale_power(SpectralField& c, double mu, double sigma) {
    scale_radial(c, [=](double ksq) { return std::pow(mu + ksq, sigma); });
}

}  // namespace

ScalarField apply_Gp(const ResolventProblem& pr, const ScalarField& f) {
    SpectralField c = fft_forward(f);
    scale_bessel(c, pr.mu(), 1.0);
    return grad_dot_bpow(pr, c);
}

ScalarField apply_Gp_adjoint(const ResolventProblem& pr, const ScalarField& f) {
    SpectralField c = neg_div_bpow_coeffs(pr, f);
    scale_bessel(c, pr.mu(), 1.0);
    return fft_inverse(c);
}

ScalarField apply_Qp(const ResolventProblem& pr, const ScalarField& f) {
    SpectralField c = mult_bcomp_coeffs(pr, f);
    scale_bessel(c, pr.mu(), 1.0);
    return fft_inverse(c);
}

ScalarField apply_Qp_adjoint(const ResolventProblem& pr, const ScalarField& f) {
    return mult_bcomp(pr, bessel_apply(pr.mu(), 1.0, f));
}

ScalarField apply_Tp(const ResolventProblem& pr, const ScalarField& f) {
    SpectralField c = mult_bcomp_coeffs(pr, f);
    scale_bessel(c, pr.mu(), 1.0);
    return grad_dot_bpow(pr, c);
}

ScalarField apply_Tp_adjoint(const ResolventProblem& pr, const ScalarField& f) {
    SpectralField c = neg_div_bpow_coeffs(pr, f);
    scale_bessel(c, pr.mu(), 1.0);
    return mult_bcomp(pr, fft_inverse(c));
}

ScalarField apply_Gp_r(const ResolventProblem& pr, const ScalarField& f) {
    SpectralField c = fft_forward(f);
    scale_power(c, pr.mu(), -0.5 - 1.0 / pr.r());
    return grad_dot_bpow(pr, c);
}

ScalarField apply_Qp_q(const ResolventProblem& pr, const ScalarField& f) {
    SpectralField c = mult_bcomp_coeffs(pr, f);
    scale_power(c, pr.mu(), -0.5 + 1.0 / pr.q());
    return fft_inverse(c);
}

ScalarField apply_advection(const ResolventProblem& pr, const ScalarField& u) {
    return mult_bcomp(pr, grad_dot_bpow(pr, fft_forward(u)));
}

ScalarField apply_forward(const ResolventProblem& pr, const ScalarField& u) {
    ScalarField out = apply_advection(pr, u);
    SpectralField c = fft_forward(u);
    scale_radial(c, [&](double ksq) { return pr.mu() + ksq; });
    out += fft_inverse(c);
    return out;
}

namespace {

std::pair<ScalarField, NeumannReport> neumann_loop(
    const ResolventProblem& pr, const ScalarField& g,
    const std::function<ScalarField(const ScalarField&)>& T) {
    NeumannReport rep;
    const double p = pr.p();
    const double gn = lp_norm(g, p);
    ScalarField x = g;
    rep.terms_used = 1;
    if (gn == 0.0) {
        rep.converged = true;
        return {x, rep};
    }
    ScalarField term = g;
    double prev = gn;
    int consecutive_growth = 0;
    for (int k = 1; k < pr.tol().neumann_max_terms; ++k) {
        term = T(term);
        term *= -1.0;
        x += term;
        ++rep.terms_used;
        const double tn = lp_norm(term, p);
        rep.last_term_ratio = tn / prev;
        prev = tn;
        if (tn <= pr.tol().neumann_tol * gn) {
            rep.converged = true;
            break;
        }
        if (rep.last_term_ratio >= 1.0) {
            if (++consecutive_growth >= 3) {
                rep.diverged = true;
                break;
            }
        } else {
            consecutive_growth = 0;
        }
    }
    const double rho = rep.last_term_ratio;
    rep.tail_bound = rho < 1.0 ? prev * rho / (1.0 - rho)
                               : std::numeric_limits<double>::infinity();
    return {std::move(x), rep};
}

}  // namespace

std::pair<ScalarField, NeumannReport> neumann_inverse(const ResolventProblem& pr,
                                                      const ScalarField& g) {
    return neumann_loop(pr, g, [&](const ScalarField& v) { return apply_Tp(pr, v); });
}

std::pair<ScalarField, NeumannReport> neumann_inverse_adjoint(const ResolventProblem& pr,
                                                              const ScalarField& g) {
    return neumann_loop(pr, g,
                        [&](const ScalarField& v) { return apply_Tp_adjoint(pr, v); });
}

ThetaResult theta_apply(const ResolventProblem& pr, const ScalarField& f) {
    auto [x, rep] = neumann_inverse(pr, apply_Gp(pr, f));
    ScalarField u = bessel_apply(pr.mu(), 1.0, f);
    u -= apply_Qp(pr, x);
    return {std::move(u), rep};
}

ThetaResult theta_apply_adjoint(const ResolventProblem& pr, const ScalarField& f) {
    auto [x, rep] = neumann_inverse_adjoint(pr, apply_Qp_adjoint(pr, f));
    ScalarField u = bessel_apply(pr.mu(), 1.0, f);
    u -= apply_Gp_adjoint(pr, x);
    return {std::move(u), rep};
}

ThetaResult theta_factored_apply(const ResolventProblem& pr, const ScalarField& f) {
    if (!pr.has_rq())
        throw InvalidParameter("theta_factored_apply: problem has no (r, q)");
    const double mu = pr.mu();
    const ScalarField s1 = bessel_power(mu, -0.5 + 1.0 / pr.r(), f);
    auto [x, rep] = neumann_inverse(pr, apply_Gp_r(pr, s1));
    const ScalarField v = apply_Qp_q(pr, x);
    ScalarField u = bessel_apply(mu, 1.0, f);
    u -= bessel_power(mu, -0.5 - 1.0 / pr.q(), v);
    return {std::move(u), rep};
}

LinearOp op_Gp(ProblemPtr pr) {
    return {[pr](const ScalarField& f) { return apply_Gp(*pr, f); },
            [pr](const ScalarField& f) { return apply_Gp_adjoint(*pr, f); }};
}

LinearOp op_Qp(ProblemPtr pr) {
    return {[pr](const ScalarField& f) { return apply_Qp(*pr, f); },
            [pr](const ScalarField& f) { return apply_Qp_adjoint(*pr, f); }};
}

LinearOp op_Tp(ProblemPtr pr) {
    return {[pr](const ScalarField& f) { return apply_Tp(*pr, f); },
            [pr](const ScalarField& f) { return apply_Tp_adjoint(*pr, f); }};
}

LinearOp op_Gp_r(ProblemPtr pr) {
    // adjoint: -(mu-Delta)^{-1/2-1/r} div(b_pow .)
    return {[pr](const ScalarField& f) { return apply_Gp_r(*pr, f); },
            [pr](const ScalarField& f) {
                SpectralField c = neg_div_bpow_coeffs(*pr, f);
                scale_radial(c, [&](double ksq) {
                    return std::pow(pr->mu() + ksq, -0.5 - 1.0 / pr->r());
                });
                return fft_inverse(c);
            }};
}

LinearOp op_Qp_q(ProblemPtr pr) {
    return {[pr](const ScalarField& f) { return apply_Qp_q(*pr, f); },
            [pr](const ScalarField& f) {
                return mult_bcomp(*pr,
                                  bessel_power(pr->mu(), -0.5 + 1.0 / pr->q(), f));
            }};
}

LinearOp op_theta(ProblemPtr pr) {
    return {[pr](const ScalarField& f) { return theta_apply(*pr, f).u; },
            [pr](const ScalarField& f) { return theta_apply_adjoint(*pr, f).u; }};
}

double pseudo_resolvent_defect(const ResolventProblem& pr_mu,
                               const ResolventProblem& pr_nu, const ScalarField& f) {
    const double p = pr_mu.p();
    const ScalarField tnu = theta_apply(pr_nu, f).u;
    ScalarField defect = theta_apply(pr_mu, f).u;
    defect -= tnu;
    defect.axpy(pr_mu.mu() - pr_nu.mu(), theta_apply(pr_mu, tnu).u);
    return lp_norm(defect, p) / lp_norm(f, p);
}

double mu_to_identity_defect(const ResolventProblem& pr, const ScalarField& f) {
    ScalarField d = theta_apply(pr, f).u;
    d *= pr.mu();
    d -= f;
    return lp_norm(d, pr.p()) / lp_norm(f, pr.p());
}

QuasiContraction quasicontraction_check(ProblemPtr pr, double mu0, int probes, int iters,
                                        Rng rng) {
    if (!(pr->mu() > mu0))
        throw InvalidParameter("quasicontraction_check: mu must exceed mu0");
    QuasiContraction out;
    out.mu0_used = mu0;
    out.norm = estimate_opnorm_p(op_theta(pr), pr->grid(), pr->p(), probes, iters, rng);
    out.ratio = out.norm.value * (pr->mu() - mu0);
    return out;
}

Calibration calibrate_mu0(std::shared_ptr<const DriftField> drift, double delta_hat,
                          double p, const std::vector<double>& mu_grid, Tolerances tol,
                          int probes, int iters, Rng rng) {
    if (mu_grid.empty()) throw InvalidParameter("calibrate_mu0: empty mu grid");
    Calibration cal;
    cal.delta_hat = delta_hat;
    cal.c_delta_p = contraction_constant(delta_hat, p);
    bool found = false;
    for (std::size_t i = 0; i < mu_grid.size(); ++i) {
        if (i > 0 && mu_grid[i] <= mu_grid[i - 1])
            throw InvalidParameter("calibrate_mu0: mu grid must ascend");
        CalibrationRow row;
        row.mu = mu_grid[i];
        if (found) {  // later rows are informational only once mu0 is fixed
            cal.rows.push_back(row);
            continue;
        }
        ProblemPtr pr = make_problem(drift, row.mu, p, tol);
        row.t_norm =
            estimate_opnorm_p(op_Tp(pr), pr->grid(), p, probes, iters, rng.split(i)).value;
        Rng probe_rng = rng.split("neumann-probe");
        const ScalarField g = colored_field(pr->grid(), probe_rng, 1.0);
        const auto [x, rep] = neumann_inverse(*pr, g);
        row.neumann_ratio = rep.last_term_ratio;
        row.admissible = row.t_norm <= cal.c_delta_p * (1.0 + 1e-9) && rep.converged &&
                         !rep.diverged && rep.last_term_ratio < 1.0;
        if (row.admissible) {
            cal.mu0 = row.mu;
            found = true;
        }
        cal.rows.push_back(row);
    }
    if (!found) throw CalibrationFailure("calibrate_mu0: no admissible mu in grid");
    return cal;
}

}  // namespace formbound
