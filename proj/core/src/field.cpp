#include "formbound/field.hpp"

#include <cmath>

#include "formbound/errors.hpp"

namespace formbound {

namespace {
void check_same_grid(const ScalarField& a, const ScalarField& b) {
    if (!a.grid() || !b.grid() || !a.grid()->same_geometry(*b.grid()))
        throw InvalidParameter("field operation: grids differ");
}
}  // namespace

ScalarField::ScalarField(GridPtr grid, double fill)
    : grid_(std::move(grid)), v_(grid_->size(), fill) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), v_(std::move(values)) {
    if (v_.size() != grid_->size())
        throw InvalidParameter("ScalarField: value count does not match grid");
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    check_same_grid(*this, o);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    check_same_grid(*this, o);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& x : v_) x *= s;
    return *this;
}

ScalarField& ScalarField::axpy(double s, const ScalarField& o) {
    check_same_grid(*this, o);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += s * o.v_[i];
    return *this;
}

bool ScalarField::is_finite() const {
    for (double x : v_)
        if (!std::isfinite(x)) return false;
    return true;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

VectorField::VectorField(GridPtr grid, double fill) {
    comp_.reserve(grid->dim());
    for (int j = 0; j < grid->dim(); ++j) comp_.emplace_back(grid, fill);
}

VectorField::VectorField(std::vector<ScalarField> components) : comp_(std::move(components)) {
    if (comp_.empty()) throw InvalidParameter("VectorField: no components");
    for (const auto& c : comp_) check_same_grid(comp_.front(), c);
    if (static_cast<int>(comp_.size()) != comp_.front().grid()->dim())
        throw InvalidParameter("VectorField: component count must equal grid dimension");
}

ScalarField VectorField::magnitude() const {
    ScalarField m(grid(), 0.0);
    for (const auto& c : comp_)
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += c[i] * c[i];
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::sqrt(m[i]);
    return m;
}

VectorField& VectorField::operator*=(double s) {
    for (auto& c : comp_) c *= s;
    return *this;
}

SpectralField::SpectralField(GridPtr grid)
    : grid_(std::move(grid)), c_(grid_->spectral_size(), std::complex<double>(0.0, 0.0)) {}

}  // namespace formbound
