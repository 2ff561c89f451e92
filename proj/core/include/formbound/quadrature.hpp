#pragma once

#include <vector>

#include "formbound/field.hpp"

namespace formbound {

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule gauss_legendre_01(int m);

struct QuadratureInfo {
    int nodes_per_segment = 0;
    double error_estimate = 0.0;  // sup relative symbol change at the last doubling
    bool converged = false;
};

/// (mu - Delta)^{-alpha} through the integral representation
/// (sin(pi a)/pi) * Int_0^inf t^{-a} (t + mu - Delta)^{-1} dt, 0 < alpha < 1.
/// The integral is split at t = mu with power substitutions absorbing the
/// endpoint singularities on both segments; nodes double until the symbol
/// change drops below rtol. Throws ConvergenceFailure when max_nodes is hit.
ScalarField bessel_apply_quadrature(double mu, double alpha, const ScalarField& u,
                                    double rtol = 1e-8, int max_nodes = 4096,
                                    QuadratureInfo* info = nullptr);

/// Scalar version of the same quadrature: value at one symbol point kappa =
/// |k|^2. Exposed for tests.
double bessel_symbol_quadrature(double mu, double alpha, double kappa, int nodes);

}  // namespace formbound
