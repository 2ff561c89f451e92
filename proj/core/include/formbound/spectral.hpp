#pragma once

#include <functional>

#include "formbound/fft.hpp"

namespace formbound {

/// Apply a real radial symbol s(|k|^2) as a Fourier multiplier.
ScalarField apply_radial_multiplier(const ScalarField& u,
                                    const std::function<double(double)>& symbol);

/// |k|^2 at every stored mode, in storage order.
std::vector<double> ksq_values(const TorusGrid& g);

/// In-place radial scaling of a coefficient array.
void scale_radial(SpectralField& c, const std::function<double(double)>& symbol);

/// Spectral gradient; differentiation symbols are odd with the Nyquist mode
/// zeroed so real input gives real output.
VectorField gradient(const ScalarField& u);
ScalarField divergence(const VectorField& v);
ScalarField laplacian(const ScalarField& u);

/// Coefficients of d/dx_axis applied to c.
SpectralField gradient_component_spectral(const SpectralField& c, int axis);

/// Bessel potential (mu - Delta)^{-alpha}, mu > 0, 0 < alpha <= 1.
ScalarField bessel_apply(double mu, double alpha, const ScalarField& u);
/// In-place symbol (mu + |k|^2)^{-alpha} on coefficients.
void scale_bessel(SpectralField& c, double mu, double alpha);
/// General real power (mu - Delta)^{sigma}, mu > 0, any real sigma.
ScalarField bessel_power(double mu, double sigma, const ScalarField& u);

/// Heat smoothing e^{eps*Delta}; eps = 0 is the identity.
ScalarField heat_smooth(double eps, const ScalarField& u);

}  // namespace formbound
