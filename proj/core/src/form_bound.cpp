#include "formbound/form_bound.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "formbound/errors.hpp"
#include "formbound/norms.hpp"
#include "formbound/probes.hpp"
#include "formbound/spectral.hpp"

namespace formbound {

namespace {

FormBoundEstimate power_iterate(const GridPtr& grid, const ScalarField& weight,
                                double lambda, double alpha, int probes, int iters,
                                ProductRule rule, Rng& rng, double rtol) {
    if (probes < 1 || iters < 1)
        throw InvalidParameter("estimate_form_bound: probes and iters must be >= 1");

    auto apply_A = [&](const ScalarField& v) {
        ScalarField w = bessel_apply(lambda, alpha, v);
        w = multiply(weight, w, rule);
        return bessel_apply(lambda, alpha, w);
    };

    FormBoundEstimate best;
    for (int pr = 0; pr < probes; ++pr) {
        Rng stream = rng.split(static_cast<std::uint64_t>(pr));
        ScalarField v = normalized_l2(white_field(grid, stream));
        double ray = 0.0, resid = 0.0;
        int it = 0;
        for (; it < iters; ++it) {
            ScalarField w = apply_A(v);
            ray = inner(v, w);  // v has unit norm
            ScalarField rvec = w;
            rvec.axpy(-ray, v);
            resid = lp_norm(rvec, 2.0);
            const double wn = lp_norm(w, 2.0);
            if (wn == 0.0) {
                ray = 0.0;
                resid = 0.0;
                break;
            }
            if (resid <= rtol * std::max(ray, 1e-300)) {
                ++it;
                break;
            }
            w *= 1.0 / wn;
            v = std::move(w);
        }
        if (ray > best.delta_hat || pr == 0) {
            best.delta_hat = std::max(ray, 0.0);
            best.residual = resid;
            best.iters_used = it;
            best.converged = resid <= rtol * std::max(ray, 1e-300);
        }
    }
    return best;
}

}  // namespace

FormBoundEstimate estimate_form_bound(const DriftField& drift, int probes, int iters,
                                      ProductRule rule, Rng rng, double rtol) {
    ScalarField w2(drift.speed.grid());
    for (std::size_t i = 0; i < w2.size(); ++i) w2[i] = drift.speed[i] * drift.speed[i];
    return power_iterate(drift.b.grid(), w2, drift.lambda, 0.5, probes, iters, rule, rng,
                         rtol);
}

FormBoundEstimate estimate_weak_form_bound(const DriftField& drift, int probes, int iters,
                                           ProductRule rule, Rng rng, double rtol) {
    return power_iterate(drift.b.grid(), drift.speed, drift.lambda, 0.25, probes, iters,
                         rule, rng, rtol);
}

double weak_class_md(int d) {
    if (d < 3) throw InvalidParameter("weak_class_md: d must be >= 3");
    const double dd = d;
    return std::sqrt(std::numbers::pi) * std::pow(2.0 * std::numbers::e, -0.5) *
           std::pow(dd, dd / 2.0) * std::pow(dd - 1.0, -(dd - 1.0) / 2.0);
}

WeakClassConstants weak_class_constants(int d, double delta) {
    if (delta < 0.0) throw InvalidParameter("weak_class_constants: delta must be >= 0");
    WeakClassConstants out;
    out.m_d = weak_class_md(d);
    const double prod = out.m_d * delta;
    if (prod > 1.0 + 1e-12)
        throw AdmissibilityError("weak_class_constants: m_d * delta exceeds 1");
    const double s = std::sqrt(std::max(0.0, 1.0 - prod));
    out.p_minus = 2.0 / (1.0 + s);
    out.p_plus = (s >= 1.0) ? std::numeric_limits<double>::infinity() : 2.0 / (1.0 - s);
    return out;
}

}  // namespace formbound
