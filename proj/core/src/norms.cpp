#include "formbound/norms.hpp"

#include <algorithm>
#include <cmath>

#include "formbound/errors.hpp"

namespace formbound {

double lp_norm(const ScalarField& u, double p) {
    if (std::isinf(p)) return max_abs(u);
    if (!(p >= 1.0)) throw InvalidParameter("lp_norm: p must be >= 1 or infinity");
    double acc = 0.0;
    if (p == 2.0) {
        for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * u[i];
        return std::sqrt(acc * u.grid()->cell_volume());
    }
    if (p == 1.0) {
        for (std::size_t i = 0; i < u.size(); ++i) acc += std::abs(u[i]);
        return acc * u.grid()->cell_volume();
    }
    for (std::size_t i = 0; i < u.size(); ++i) acc += std::pow(std::abs(u[i]), p);
    return std::pow(acc * u.grid()->cell_volume(), 1.0 / p);
}

double inner(const ScalarField& u, const ScalarField& v) {
    if (!u.grid()->same_geometry(*v.grid())) throw InvalidParameter("inner: grids differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
    return acc * u.grid()->cell_volume();
}

double max_abs(const ScalarField& u) {
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i]));
    return m;
}

double min_value(const ScalarField& u) {
    return *std::min_element(u.values().begin(), u.values().end());
}

double max_value(const ScalarField& u) {
    return *std::max_element(u.values().begin(), u.values().end());
}

double mean(const ScalarField& u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += u[i];
    return acc / static_cast<double>(u.size());
}

}  // namespace formbound
