#pragma once

#include "formbound/fft.hpp"

namespace formbound {

/// How pointwise products of fields are formed. dealias32 pads to a 3n/2
/// grid so quadratic products are exact projections onto the coarse band.
enum class ProductRule { pointwise, dealias32 };

/// The 3n/2 companion grid used by dealias32 (rounded up to even).
GridPtr dealias_fine_grid(const GridPtr& coarse);

/// Zero-padded coefficient embedding; the coarse Nyquist plane is dropped.
SpectralField pad_spectrum(const SpectralField& c, const GridPtr& fine);
/// Band truncation back to the coarse lattice (Nyquist plane set to zero).
SpectralField truncate_spectrum(const SpectralField& fine, const GridPtr& coarse);

/// Trigonometric interpolation onto a finer grid (the isometry Z).
ScalarField interpolate(const ScalarField& u, const GridPtr& fine);
/// Adjoint of interpolate: analyze on the fine grid, truncate, synthesize.
ScalarField project(const ScalarField& fine_values, const GridPtr& coarse);

ScalarField multiply(const ScalarField& a, const ScalarField& b, ProductRule rule);
ScalarField dot_product(const VectorField& a, const VectorField& b, ProductRule rule);

}  // namespace formbound
