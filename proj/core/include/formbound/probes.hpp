#pragma once

#include "formbound/field.hpp"
#include "formbound/rng.hpp"

namespace formbound {

/// iid Gaussian samples at the grid points.
ScalarField white_field(const GridPtr& grid, Rng& rng);

/// White field colored by (1+|k|^2)^{-order/2}, normalized to unit L^2 norm.
ScalarField colored_field(const GridPtr& grid, Rng& rng, double order);

/// Random trig polynomial with modes |m_j| <= band. Coefficients are drawn
/// in a fixed mode order, so the same seed gives the same continuum function
/// on every grid with n > 2*band (refinement-stable probes).
ScalarField band_limited_field(const GridPtr& grid, int band, Rng& rng);

/// Periodic Gaussian bump centered at the box center, exp(-rho^2/(2 w^2)).
ScalarField gaussian_bump(const GridPtr& grid, double width);

/// Scale to unit L^2 norm (no-op on the zero field).
ScalarField normalized_l2(ScalarField f);

}  // namespace formbound
