#include "formbound/products.hpp"

#include <vector>

#include "formbound/errors.hpp"

namespace formbound {

namespace {

// Coarse full-axis index -> fine index, or -1 for the dropped Nyquist plane.
std::vector<int> axis_map(int n_coarse, int n_fine) {
    std::vector<int> map(n_coarse, -1);
    for (int i = 0; i < n_coarse; ++i) {
        if (i == n_coarse / 2) continue;  // Nyquist dropped
        const int m = i < n_coarse / 2 ? i : i - n_coarse;
        map[i] = m >= 0 ? m : m + n_fine;
    }
    return map;
}

// Walk the coarse spectral lattice; fn(coarse_flat, fine_flat) for kept
// modes, fn(coarse_flat, -1) for dropped ones.
template <class F>
void visit_pad_map(const TorusGrid& gc, const TorusGrid& gf, F&& fn) {
    const int d = gc.dim();
    const int nc = gc.n();
    const int nlc = gc.last_size();
    const auto amap = axis_map(nc, gf.n());

    std::vector<std::size_t> stride_f(d);
    stride_f[d - 1] = 1;
    const std::size_t nlf = static_cast<std::size_t>(gf.last_size());
    if (d >= 2) stride_f[d - 2] = nlf;
    for (int j = d - 3; j >= 0; --j)
        stride_f[j] = stride_f[j + 1] * static_cast<std::size_t>(gf.n());

    std::vector<int> idx(d - 1, 0);
    std::size_t flat_c = 0;
    const std::size_t rows = gc.spectral_size() / nlc;
    for (std::size_t row = 0; row < rows; ++row) {
        bool row_dropped = false;
        std::size_t base_f = 0;
        for (int j = 0; j < d - 1; ++j) {
            const int mf = amap[idx[j]];
            if (mf < 0) {
                row_dropped = true;
                break;
            }
            base_f += stride_f[j] * static_cast<std::size_t>(mf);
        }
        for (int jl = 0; jl < nlc; ++jl, ++flat_c) {
            if (row_dropped || jl == nc / 2)
                fn(flat_c, static_cast<std::size_t>(-1));
            else
                fn(flat_c, base_f + static_cast<std::size_t>(jl));
        }
        for (int j = d - 2; j >= 0; --j) {
            if (++idx[j] < nc) break;
            idx[j] = 0;
        }
    }
}

void check_fine(const TorusGrid& gc, const TorusGrid& gf) {
    if (gf.dim() != gc.dim() || gf.edge() != gc.edge() || gf.n() < gc.n())
        throw InvalidParameter("dealias: fine grid incompatible with coarse grid");
}

}  // namespace

GridPtr dealias_fine_grid(const GridPtr& coarse) {
    int nf = (3 * coarse->n()) / 2;
    if (nf % 2 != 0) ++nf;
    return make_grid(coarse->dim(), nf, coarse->edge());
}

SpectralField pad_spectrum(const SpectralField& c, const GridPtr& fine) {
    check_fine(*c.grid(), *fine);
    SpectralField out(fine);
    visit_pad_map(*c.grid(), *fine, [&](std::size_t ic, std::size_t iff) {
        if (iff != static_cast<std::size_t>(-1)) out[iff] = c[ic];
    });
    return out;
}

SpectralField truncate_spectrum(const SpectralField& fine, const GridPtr& coarse) {
    check_fine(*coarse, *fine.grid());
    SpectralField out(coarse);
    visit_pad_map(*coarse, *fine.grid(), [&](std::size_t ic, std::size_t iff) {
        if (iff != static_cast<std::size_t>(-1)) out[ic] = fine[iff];
    });
    return out;
}

ScalarField interpolate(const ScalarField& u, const GridPtr& fine) {
    return fft_inverse(pad_spectrum(fft_forward(u), fine));
}

ScalarField project(const ScalarField& fine_values, const GridPtr& coarse) {
    return fft_inverse(truncate_spectrum(fft_forward(fine_values), coarse));
}

ScalarField multiply(const ScalarField& a, const ScalarField& b, ProductRule rule) {
    if (!a.grid()->same_geometry(*b.grid()))
        throw InvalidParameter("multiply: grids differ");
    if (rule == ProductRule::pointwise) {
        ScalarField out(a.grid());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
        return out;
    }
    const GridPtr fine = dealias_fine_grid(a.grid());
    ScalarField af = interpolate(a, fine);
    const ScalarField bf = interpolate(b, fine);
    for (std::size_t i = 0; i < af.size(); ++i) af[i] *= bf[i];
    return project(af, a.grid());
}

ScalarField dot_product(const VectorField& a, const VectorField& b, ProductRule rule) {
    if (!a.grid()->same_geometry(*b.grid()))
        throw InvalidParameter("dot_product: grids differ");
    if (rule == ProductRule::pointwise) {
        ScalarField out(a.grid(), 0.0);
        for (int j = 0; j < a.dim(); ++j)
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += a[j][i] * b[j][i];
        return out;
    }
    const GridPtr fine = dealias_fine_grid(a.grid());
    ScalarField acc(fine, 0.0);
    for (int j = 0; j < a.dim(); ++j) {
        const ScalarField af = interpolate(a[j], fine);
        const ScalarField bf = interpolate(b[j], fine);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += af[i] * bf[i];
    }
    return project(acc, a.grid());
}

}  // namespace formbound
