#include "formbound/spectral.hpp"

#include <cmath>
#include <vector>

#include "formbound/errors.hpp"

namespace formbound {

namespace {

// Visit every stored mode; fn(flat, ksq). Rows run over the d-1 full axes,
// the half-stored last axis is contiguous.
template <class F>
void visit_radial(const TorusGrid& g, F&& fn) {
    const int d = g.dim();
    const int n = g.n();
    const int nl = g.last_size();
    const int nfull = d - 1;
    std::vector<int> idx(nfull, 0);
    std::size_t flat = 0;
    const std::size_t rows = g.spectral_size() / nl;
    for (std::size_t row = 0; row < rows; ++row) {
        double base = 0.0;
        for (int j = 0; j < nfull; ++j) {
            const double k = g.k_even(idx[j]);
            base += k * k;
        }
        for (int jl = 0; jl < nl; ++jl, ++flat) {
            const double kl = g.k_even_last(jl);
            fn(flat, base + kl * kl);
        }
        for (int j = nfull - 1; j >= 0; --j) {
            if (++idx[j] < n) break;
            idx[j] = 0;
        }
    }
}

// Visit every stored mode with the odd (differentiation) wavenumber of one axis.
template <class F>
void visit_axis_odd(const TorusGrid& g, int axis, F&& fn) {
    const int d = g.dim();
    const int n = g.n();
    const int nl = g.last_size();
    const int nfull = d - 1;
    std::vector<int> idx(nfull, 0);
    std::size_t flat = 0;
    const std::size_t rows = g.spectral_size() / nl;
    for (std::size_t row = 0; row < rows; ++row) {
        const double krow = (axis < nfull) ? g.k_odd(idx[axis]) : 0.0;
        for (int jl = 0; jl < nl; ++jl, ++flat) {
            const double k = (axis == d - 1) ? g.k_odd_last(jl) : krow;
            fn(flat, k);
        }
        for (int j = nfull - 1; j >= 0; --j) {
            if (++idx[j] < n) break;
            idx[j] = 0;
        }
    }
}

}  // namespace

void scale_radial(SpectralField& c, const std::function<double(double)>& symbol) {
    visit_radial(*c.grid(), [&](std::size_t i, double ksq) { c[i] *= symbol(ksq); });
}

std::vector<double> ksq_values(const TorusGrid& g) {
    std::vector<double> out(g.spectral_size());
    visit_radial(g, [&](std::size_t i, double ksq) { out[i] = ksq; });
    return out;
}

ScalarField apply_radial_multiplier(const ScalarField& u,
                                    const std::function<double(double)>& symbol) {
    SpectralField c = fft_forward(u);
    scale_radial(c, symbol);
    return fft_inverse(c);
}

SpectralField gradient_component_spectral(const SpectralField& c, int axis) {
    SpectralField out = c;
    visit_axis_odd(*c.grid(), axis, [&](std::size_t i, double k) {
        const std::complex<double> v = out[i];
        out[i] = std::complex<double>(-k * v.imag(), k * v.real());
    });
    return out;
}

VectorField gradient(const ScalarField& u) {
    const SpectralField c = fft_forward(u);
    std::vector<ScalarField> comp;
    comp.reserve(u.grid()->dim());
    for (int j = 0; j < u.grid()->dim(); ++j)
        comp.push_back(fft_inverse(gradient_component_spectral(c, j)));
    return VectorField(std::move(comp));
}

ScalarField divergence(const VectorField& v) {
    SpectralField acc(v.grid());
    for (int j = 0; j < v.dim(); ++j) {
        SpectralField cj = fft_forward(v[j]);
        visit_axis_odd(*v.grid(), j, [&](std::size_t i, double k) {
            const std::complex<double> x = cj[i];
            acc[i] += std::complex<double>(-k * x.imag(), k * x.real());
        });
    }
    return fft_inverse(acc);
}

ScalarField laplacian(const ScalarField& u) {
    return apply_radial_multiplier(u, [](double ksq) { return -ksq; });
}

void scale_bessel(SpectralField& c, double mu, double alpha) {
    if (alpha == 1.0) {
        visit_radial(*c.grid(), [&](std::size_t i, double ksq) { c[i] *= 1.0 / (mu + ksq); });
    } else {
        visit_radial(*c.grid(),
                     [&](std::size_t i, double ksq) { c[i] *= std::pow(mu + ksq, -alpha); });
    }
}

ScalarField bessel_apply(double mu, double alpha, const ScalarField& u) {
    if (!(mu > 0.0)) throw InvalidParameter("bessel_apply: mu must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw InvalidParameter("bessel_apply: alpha must lie in (0, 1]");
    SpectralField c = fft_forward(u);
    scale_bessel(c, mu, alpha);
    return fft_inverse(c);
}

ScalarField bessel_power(double mu, double sigma, const ScalarField& u) {
    if (!(mu > 0.0)) throw InvalidParameter("bessel_power: mu must be positive");
    return apply_radial_multiplier(u, [=](double ksq) { return std::pow(mu + ksq, sigma); });
}

ScalarField heat_smooth(double eps, const ScalarField& u) {
    if (eps < 0.0) throw InvalidParameter("heat_smooth: eps must be nonnegative");
    if (eps == 0.0) return u;
    return apply_radial_multiplier(u, [=](double ksq) { return std::exp(-eps * ksq); });
}

}  // namespace formbound
