#include "formbound/constants.hpp"

#include <cmath>
#include <limits>

#include "formbound/errors.hpp"

namespace formbound {

double contraction_constant(double delta, double p) {
    if (!(p >= 2.0)) throw InvalidParameter("contraction_constant: p must be >= 2");
    if (!(delta >= 0.0)) throw InvalidParameter("contraction_constant: delta must be >= 0");
    const double s = std::sqrt(delta);
    const double num = (p / 2.0) * delta + ((p - 2.0) / 2.0) * s;
    const double den =
        p - 1.0 - (p - 1.0) * ((p - 2.0) / 2.0) * s - (p * (p - 2.0) / 4.0) * delta;
    if (!(den > 0.0))
        throw AdmissibilityError("contraction_constant: nonpositive denominator base");
    return std::pow(num, 1.0 / p) * std::pow(den, -1.0 / p);
}

PRange admissible_p_range(double delta) {
    if (delta < 0.0) throw InvalidParameter("admissible_p_range: delta must be >= 0");
    if (delta >= 1.0)
        throw AdmissibilityError("admissible_p_range: delta must be below 1");
    PRange r;
    r.hi = delta == 0.0 ? std::numeric_limits<double>::infinity()
                        : 2.0 / std::sqrt(delta);
    return r;
}

}  // namespace formbound
