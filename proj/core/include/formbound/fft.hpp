#pragma once

#include "formbound/field.hpp"

namespace formbound {

/// Forward transform to Fourier coefficients (unitary in the analysis
/// direction: divides by n^d).
SpectralField fft_forward(const ScalarField& u);

/// Synthesis back to real samples.
ScalarField fft_inverse(const SpectralField& c);

}  // namespace formbound
