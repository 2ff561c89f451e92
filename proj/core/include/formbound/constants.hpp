#pragma once

#include <string>

namespace formbound {

/// The contraction constant
///   c_{delta,p} = ((p/2) d + ((p-2)/2) sqrt(d))^{1/p}
///               * (p-1 - (p-1)((p-2)/2) sqrt(d) - (p(p-2)/4) d)^{-1/p}
/// controlling ||T_p|| < 1; throws AdmissibilityError when the denominator
/// base is nonpositive (the bound is vacuous there).
double contraction_constant(double delta, double p);

/// Half-open admissible exponent interval [2, 2/sqrt(delta)); delta >= 1 is
/// rejected, delta == 0 gives an unbounded interval.
struct PRange {
    double lo = 2.0;
    double hi = 0.0;
    bool contains(double p) const { return p >= lo && p < hi; }
};
PRange admissible_p_range(double delta);

/// Measured and calibrated constants for one (drift, p) pair.
struct ConstantsLedger {
    std::string drift;
    double p = 0.0;
    double delta_hat = 0.0;
    double lambda = 0.0;
    double c_delta_p = 0.0;
    double mu0 = 0.0;  // calibrated threshold
    double C1 = 0.0;   // sup ||G_p|| mu^{1/2-1/p}
    double C2 = 0.0;   // sup ||Q_p|| mu^{1/2+1/p}
    double K1r = 0.0;  // sup ||G_p(r)||
    double K2q = 0.0;  // sup ||Q_p(q)||
    double K1 = 0.0;   // sup ||grad u||_p (mu-mu1)^{1/2} / ||f||_p
    double K2 = 0.0;   // sup ||grad |grad u|^{p/2}||_2^{2/p} (mu-mu1)^{1/2-1/p} / ||f||_p
    double mu1 = 0.0;  // stored equal to mu0 (single calibrated threshold)
};

}  // namespace formbound
