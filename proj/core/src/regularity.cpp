#include "formbound/regularity.hpp"

#include <algorithm>
#include <cmath>

#include "formbound/errors.hpp"
#include "formbound/norms.hpp"
#include "formbound/probes.hpp"
#include "formbound/spectral.hpp"

namespace formbound {

double sobolev_norm(const ScalarField& u, double alpha, double p) {
    if (alpha == 0.0) return lp_norm(u, p);
    const ScalarField w = apply_radial_multiplier(
        u, [=](double ksq) { return std::pow(1.0 + ksq, alpha / 2.0); });
    return lp_norm(w, p);
}

double smoothing_ratio(const ResolventProblem& pr, int probes, int band, Rng rng) {
    if (!pr.has_rq()) throw InvalidParameter("smoothing_ratio: problem has no (r, q)");
    if (probes < 1) throw InvalidParameter("smoothing_ratio: probes must be >= 1");
    const double a_out = 1.0 + 2.0 / pr.q();
    const double a_in = -1.0 + 2.0 / pr.r();
    double best = 0.0;
    for (int i = 0; i < probes; ++i) {
        Rng stream = rng.split(static_cast<std::uint64_t>(i));
        const ScalarField g = band_limited_field(pr.grid(), band, stream);
        const double den = sobolev_norm(g, a_in, pr.p());
        if (den == 0.0) continue;
        const double num = sobolev_norm(theta_apply(pr, g).u, a_out, pr.p());
        best = std::max(best, num / den);
    }
    return best;
}

namespace {

// Cyclic shift by s cells along one axis.
ScalarField shift_axis(const ScalarField& u, int axis, int s) {
    const TorusGrid& g = *u.grid();
    const int d = g.dim();
    const int n = g.n();
    std::size_t stride = 1;
    for (int j = d - 1; j > axis; --j) stride *= static_cast<std::size_t>(n);
    const std::size_t block = stride * static_cast<std::size_t>(n);
    ScalarField out(u.grid());
    for (std::size_t base = 0; base < g.size(); base += block)
        for (int i = 0; i < n; ++i) {
            const int ip = (i + s) % n;
            const std::size_t src = base + static_cast<std::size_t>(ip) * stride;
            const std::size_t dst = base + static_cast<std::size_t>(i) * stride;
            for (std::size_t off = 0; off < stride; ++off)
                out[dst + off] = u[src + off];
        }
    return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t m = x.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = m * sxx - sx * sx;
    return denom == 0.0 ? 0.0 : (m * sxy - sx * sy) / denom;
}

}  // namespace

HolderEstimate holder_estimate(const ScalarField& u, HolderOptions opt) {
    if (!u.is_finite()) throw InvalidParameter("holder_estimate: non-finite input");
    const TorusGrid& g = *u.grid();
    const int n = g.n();
    const int d = g.dim();

    HolderEstimate est;
    int prev = 0;
    for (int j = 1;; ++j) {
        const int s = std::max(1, n >> j);
        if (s == prev) break;
        prev = s;
        double omega = 0.0;
        for (int a = 0; a < d; ++a) {
            const ScalarField diff = shift_axis(u, a, s) - u;
            omega = std::max(omega, max_abs(diff));
        }
        est.h.push_back(s * g.cell());
        est.omega.push_back(omega);
        if (s == 1) break;
    }

    const double scale = max_abs(u);
    bool flat = true;
    for (double w : est.omega) flat &= (w <= 1e-14 * std::max(scale, 1.0));
    if (flat) {  // constant field convention
        est.gamma_hat = 1.0;
        est.seminorm = 0.0;
        return est;
    }

    std::vector<double> lx, ly;
    const int m = static_cast<int>(est.h.size());
    for (int j = 0; j < m; ++j) {
        if (j < opt.drop_coarse) continue;           // h descending: coarse first
        if (j >= m - opt.drop_fine) continue;
        if (est.omega[j] <= 0.0) continue;
        lx.push_back(std::log(est.h[j]));
        ly.push_back(std::log(est.omega[j]));
    }
    if (lx.size() < 2) {  // thin ladder: use everything nonzero
        lx.clear();
        ly.clear();
        for (int j = 0; j < m; ++j)
            if (est.omega[j] > 0.0) {
                lx.push_back(std::log(est.h[j]));
                ly.push_back(std::log(est.omega[j]));
            }
    }
    est.gamma_hat = std::clamp(fit_slope(lx, ly), 0.0, 1.0);
    for (int j = 0; j < m; ++j)
        est.seminorm =
            std::max(est.seminorm, est.omega[j] / std::pow(est.h[j], est.gamma_hat));
    return est;
}

GradientBoundFit gradient_bound_check(std::shared_ptr<const DriftField> drift, double p,
                                      const std::vector<double>& mu_grid, int probes,
                                      Tolerances tol, double mu1, Rng rng) {
    if (mu_grid.size() < 2)
        throw InvalidParameter("gradient_bound_check: need at least two mu values");
    GradientBoundFit fit;
    // one probe set reused across mu so the fits see the same data
    std::vector<ScalarField> fs;
    const GridPtr grid = drift->b.grid();
    for (int i = 0; i < probes; ++i) {
        Rng stream = rng.split(static_cast<std::uint64_t>(i));
        fs.push_back(colored_field(grid, stream, 1.0));
    }
    for (double mu : mu_grid) {
        if (!(mu > mu1))
            throw InvalidParameter("gradient_bound_check: mu grid must exceed mu1");
        ProblemPtr pr = make_problem(drift, mu, p, tol);
        double g1 = 0.0, g2 = 0.0;
        for (const auto& f : fs) {
            const double fn = lp_norm(f, p);
            const ScalarField u = theta_apply(*pr, f).u;
            const VectorField gu = gradient(u);
            const ScalarField speed = gu.magnitude();
            g1 = std::max(g1, lp_norm(speed, p) / fn);
            ScalarField pw(grid);
            for (std::size_t i = 0; i < pw.size(); ++i)
                pw[i] = std::pow(speed[i], p / 2.0);
            const double gp2 = lp_norm(gradient(pw).magnitude(), 2.0);
            g2 = std::max(g2, std::pow(gp2, 2.0 / p) / fn);
        }
        fit.mu.push_back(mu);
        fit.grad_norm.push_back(g1);
        fit.grad_pow_norm.push_back(g2);
        fit.K1 = std::max(fit.K1, g1 * std::sqrt(mu - mu1));
        fit.K2 = std::max(fit.K2, g2 * std::pow(mu - mu1, 0.5 - 1.0 / p));
    }
    std::vector<double> lx, l1, l2;
    for (std::size_t i = 0; i < fit.mu.size(); ++i) {
        lx.push_back(std::log(fit.mu[i]));
        l1.push_back(std::log(std::max(fit.grad_norm[i], 1e-300)));
        l2.push_back(std::log(std::max(fit.grad_pow_norm[i], 1e-300)));
    }
    fit.slope_grad = fit_slope(lx, l1);
    fit.slope_grad_pow = fit_slope(lx, l2);
    return fit;
}

PrincipalInequality principal_inequality_check(const ResolventProblem& pr,
                                               double delta_hat, const ScalarField& f) {
    if (min_value(f) < 0.0)
        throw InvalidParameter("principal_inequality_check: f must be nonnegative");
    const double p = pr.p();
    const double lambda = pr.drift().lambda;
    const ScalarField u = apply_Qp(pr, f);  // (mu-Delta)^{-1} |b|^{1-2/p} f
    const VectorField gu = gradient(u);
    const ScalarField speed = gu.magnitude();
    ScalarField pw(pr.grid());
    for (std::size_t i = 0; i < pw.size(); ++i) pw[i] = std::pow(speed[i], p / 2.0);
    const double grad_p = lp_norm(speed, p);
    const double grad_pow_2 = lp_norm(gradient(pw).magnitude(), 2.0);

    PrincipalInequality out;
    out.lhs = delta_hat *
              (lambda * std::pow(grad_p, p) + grad_pow_2 * grad_pow_2);
    if (delta_hat <= 0.0) {
        out.rhs = 0.0;
        return out;
    }
    out.rhs = std::pow(contraction_constant(delta_hat, p), p) * std::pow(lp_norm(f, p), p);
    return out;
}

}  // namespace formbound
