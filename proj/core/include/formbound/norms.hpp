#pragma once

#include <limits>

#include "formbound/field.hpp"

namespace formbound {

inline constexpr double p_infinity = std::numeric_limits<double>::infinity();

/// Quadrature-weighted l^p norm: (sum |u_i|^p h^d)^{1/p}; p = infinity is
/// max |u_i|. Trapezoidal weights are uniform on the periodic grid.
double lp_norm(const ScalarField& u, double p);

/// Weighted inner product <u,v> = h^d sum u_i v_i.
double inner(const ScalarField& u, const ScalarField& v);

double max_abs(const ScalarField& u);
double min_value(const ScalarField& u);
double max_value(const ScalarField& u);
double mean(const ScalarField& u);

}  // namespace formbound
