#pragma once

#include <complex>
#include <vector>

#include "formbound/grid.hpp"

namespace formbound {

/// Real samples on a TorusGrid, one value per grid point, row-major.
class ScalarField {
  public:
    ScalarField() = default;
    explicit ScalarField(GridPtr grid, double fill = 0.0);
    ScalarField(GridPtr grid, std::vector<double> values);

    const GridPtr& grid() const { return grid_; }
    std::size_t size() const { return v_.size(); }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }

    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);

    /// this += s * o
    ScalarField& axpy(double s, const ScalarField& o);

    bool is_finite() const;

  private:
    GridPtr grid_;
    std::vector<double> v_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// d scalar components sharing one grid.
class VectorField {
  public:
    VectorField() = default;
    explicit VectorField(GridPtr grid, double fill = 0.0);
    explicit VectorField(std::vector<ScalarField> components);

    const GridPtr& grid() const { return comp_.front().grid(); }
    int dim() const { return static_cast<int>(comp_.size()); }

    ScalarField& operator[](int j) { return comp_[j]; }
    const ScalarField& operator[](int j) const { return comp_[j]; }

    /// Pointwise Euclidean magnitude |b|.
    ScalarField magnitude() const;

    VectorField& operator*=(double s);

  private:
    std::vector<ScalarField> comp_;
};

/// Half-complex (r2c layout) Fourier coefficients of a real field.
/// Entries are actual Fourier coefficients: u(x) = sum_k c_k exp(i k.x).
class SpectralField {
  public:
    SpectralField() = default;
    explicit SpectralField(GridPtr grid);

    const GridPtr& grid() const { return grid_; }
    std::size_t size() const { return c_.size(); }

    std::complex<double>* data() { return c_.data(); }
    const std::complex<double>* data() const { return c_.data(); }
    std::complex<double>& operator[](std::size_t i) { return c_[i]; }
    const std::complex<double>& operator[](std::size_t i) const { return c_[i]; }

  private:
    GridPtr grid_;
    std::vector<std::complex<double>> c_;
};

}  // namespace formbound
