#pragma once

#include "formbound/resolvent.hpp"

namespace formbound {

/// Bessel-potential norm ||(1-Delta)^{alpha/2} u||_p (unit-shift convention);
/// alpha may be negative.
double sobolev_norm(const ScalarField& u, double alpha, double p);

/// sup over probes g of ||Theta g||_{W^{1+2/q,p}} / ||g||_{W^{-1+2/r,p}};
/// probes are band-limited so the same seed samples the same continuum
/// functions on every grid (refinement studies compare like with like).
double smoothing_ratio(const ResolventProblem& pr, int probes, int band, Rng rng);

struct HolderOptions {
    int drop_fine = 2;    // finest dyadic scales excluded from the fit
    int drop_coarse = 1;  // coarsest scales excluded
};

struct HolderEstimate {
    double gamma_hat = 0.0;
    double seminorm = 0.0;
    std::vector<double> h;      // probed shift magnitudes
    std::vector<double> omega;  // sup moduli omega(h)
};

/// Multiscale sup-modulus fit: omega(h_j) = max over axis shifts of
/// ||u(.+h) - u||_inf at h_j ~ L 2^{-j}; gamma_hat is the mid-range log-log
/// slope clamped to [0, 1]. A constant field reports gamma 1, seminorm 0.
HolderEstimate holder_estimate(const ScalarField& u, HolderOptions opt = {});

struct GradientBoundFit {
    double slope_grad = 0.0;      // fit of log ||grad u||_p vs log mu
    double slope_grad_pow = 0.0;  // fit of log ||grad |grad u|^{p/2}||_2^{2/p} vs log mu
    double K1 = 0.0;              // sup ||grad u||_p (mu-mu1)^{1/2} / ||f||_p
    double K2 = 0.0;              // sup ||grad |grad u|^{p/2}||_2^{2/p} (mu-mu1)^{1/2-1/p} / ||f||_p
    std::vector<double> mu;
    std::vector<double> grad_norm;
    std::vector<double> grad_pow_norm;
};

/// Measures both gradient bounds for u = Theta(mu) f over a mu grid.
GradientBoundFit gradient_bound_check(std::shared_ptr<const DriftField> drift, double p,
                                      const std::vector<double>& mu_grid, int probes,
                                      Tolerances tol, double mu1, Rng rng);

struct PrincipalInequality {
    double lhs = 0.0;  // delta (lambda ||grad u||_p^p + ||grad |grad u|^{p/2}||_2^2)
    double rhs = 0.0;  // c_{delta,p}^p ||f||_p^p
};

/// The principal inequality at u = (mu-Delta)^{-1} |b|^{1-2/p} f, f >= 0,
/// evaluated with the measured delta_hat.
PrincipalInequality principal_inequality_check(const ResolventProblem& pr,
                                               double delta_hat, const ScalarField& f);

struct RegularityReport {
    double sobolev_ratio = 0.0;
    double holder_gamma_hat = 0.0;
    double holder_seminorm = 0.0;
    double grad_slope = 0.0;
    double grad_pow_slope = 0.0;
    double principal_lhs = 0.0;
    double principal_rhs = 0.0;
};

}  // namespace formbound
