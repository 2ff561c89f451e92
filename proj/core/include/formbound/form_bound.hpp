#pragma once

#include "formbound/drift.hpp"
#include "formbound/rng.hpp"

namespace formbound {

struct FormBoundEstimate {
    double delta_hat = 0.0;  // best Rayleigh quotient: certified lower bound
    double residual = 0.0;   // ||A v - delta_hat v||_2 / ||v||_2 at the returned vector
    int iters_used = 0;
    bool converged = false;
};

/// Largest eigenvalue of A = (lambda-Delta)^{-1/2} M_{|b|^2} (lambda-Delta)^{-1/2}
/// by multi-start power iteration; delta_hat lower-bounds the grid form bound.
FormBoundEstimate estimate_form_bound(const DriftField& drift, int probes, int iters,
                                      ProductRule rule, Rng rng, double rtol = 1e-10);

/// Weak variant: A = (lambda-Delta)^{-1/4} M_{|b|} (lambda-Delta)^{-1/4}.
FormBoundEstimate estimate_weak_form_bound(const DriftField& drift, int probes, int iters,
                                           ProductRule rule, Rng rng, double rtol = 1e-10);

struct WeakClassConstants {
    double m_d = 0.0;
    double p_minus = 0.0;
    double p_plus = 0.0;  // +infinity when delta == 0
};

/// m_d = sqrt(pi) (2e)^{-1/2} d^{d/2} (d-1)^{-(d-1)/2}.
double weak_class_md(int d);

/// p_-/+ = 2/(1 +/- sqrt(1 - m_d delta)); throws AdmissibilityError when
/// m_d*delta > 1 (the boundary value returns the degenerate p = 2 pair).
WeakClassConstants weak_class_constants(int d, double delta);

}  // namespace formbound
