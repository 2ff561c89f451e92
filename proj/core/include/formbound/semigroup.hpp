#pragma once

#include "formbound/resolvent.hpp"

namespace formbound {

/// Backward-Euler realization of e^{-t Lambda_p(b)} from resolvent powers:
/// u_{j+1} = (n/t) Theta(n/t, b) u_j.
struct SemigroupStepper {
    ProblemPtr prob;  // built at mu_eff = steps / t
    double t = 0.0;
    int steps = 0;
};

/// steps <= 0 picks the default max(16, ceil(4 t mu0)); mu_eff must exceed
/// mu0 when a calibrated mu0 is supplied.
SemigroupStepper make_stepper(std::shared_ptr<const DriftField> drift, double p, double t,
                              int steps, Tolerances tol, double mu0 = 0.0);

struct TimeSample {
    double t = 0.0;
    double lp = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct SemigroupRun {
    ScalarField u;
    std::vector<TimeSample> series;  // per-step (t_j, ||u||_p, min u, max u)
    bool diverged = false;
};

SemigroupRun semigroup_apply(const SemigroupStepper& st, const ScalarField& f);

/// min over the grid of the final state (worst negative excursion for f >= 0).
double check_positivity(const SemigroupStepper& st, const ScalarField& f);

/// ||out||_inf / ||f||_inf.
double check_linf_contraction(const SemigroupStepper& st, const ScalarField& f);

/// Least-squares growth exponent of log ||u(t_j)||_p over the tail of the
/// time series (the first half is discarded as transient).
double fit_growth_exponent(const SemigroupRun& run);

/// Semigroup defects ||S(b_level) f - S(b_ref) f||_p for a mollification
/// schedule of one base drift; b_ref is the final (finest) level.
std::vector<double> trotter_defects(const GridPtr& grid, const DriftSpec& base,
                                    const std::vector<Mollification>& levels, double p,
                                    double t, int steps, Tolerances tol,
                                    const ScalarField& f);

}  // namespace formbound
