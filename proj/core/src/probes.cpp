#include "formbound/probes.hpp"

#include <cmath>
#include <vector>

#include "formbound/errors.hpp"
#include "formbound/norms.hpp"
#include "formbound/spectral.hpp"

namespace formbound {

ScalarField white_field(const GridPtr& grid, Rng& rng) {
    ScalarField f(grid);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.gaussian();
    return f;
}

ScalarField colored_field(const GridPtr& grid, Rng& rng, double order) {
    ScalarField w = white_field(grid, rng);
    if (order != 0.0)
        w = apply_radial_multiplier(
            w, [=](double ksq) { return std::pow(1.0 + ksq, -order / 2.0); });
    return normalized_l2(std::move(w));
}

namespace {

// Canonical representative of a +/-m conjugate pair: first nonzero entry
// positive in lexicographic order.
bool is_canonical(const std::vector<int>& m) {
    for (int v : m) {
        if (v > 0) return true;
        if (v < 0) return false;
    }
    return true;  // m == 0
}

}  // namespace

ScalarField band_limited_field(const GridPtr& grid, int band, Rng& rng) {
    const int d = grid->dim();
    const int n = grid->n();
    if (2 * band >= n) throw InvalidParameter("band_limited_field: band too wide for grid");

    SpectralField c(grid);
    const int nl = grid->last_size();
    std::vector<std::size_t> stride(d);
    stride[d - 1] = 1;
    stride[d - 2] = static_cast<std::size_t>(nl);
    for (int j = d - 3; j >= 0; --j) stride[j] = stride[j + 1] * static_cast<std::size_t>(n);

    auto slot = [&](const std::vector<int>& m) {
        std::size_t flat = 0;
        for (int j = 0; j < d - 1; ++j) {
            const int idx = m[j] >= 0 ? m[j] : m[j] + n;
            flat += stride[j] * static_cast<std::size_t>(idx);
        }
        return flat + static_cast<std::size_t>(m[d - 1]);
    };

    // Fixed lexicographic walk over the band box keeps the draw order, and
    // hence the function, independent of n. Each conjugate pair is drawn at
    // its canonical representative; distinct pairs touch distinct slots.
    std::vector<int> m(d, -band);
    std::vector<int> neg(d);
    while (true) {
        if (is_canonical(m)) {
            const double re = rng.gaussian();
            const double im = rng.gaussian();
            bool zero_mode = true;
            for (int v : m) zero_mode &= (v == 0);
            for (int j = 0; j < d; ++j) neg[j] = -m[j];
            if (zero_mode) {
                c[slot(m)] = std::complex<double>(re, 0.0);
            } else if (m[d - 1] > 0) {
                c[slot(m)] = std::complex<double>(re, im);
            } else if (m[d - 1] == 0) {
                c[slot(m)] = std::complex<double>(re, im);
                c[slot(neg)] = std::complex<double>(re, -im);
            } else {
                c[slot(neg)] = std::complex<double>(re, -im);
            }
        }
        int j = d - 1;
        for (; j >= 0; --j) {
            if (++m[j] <= band) break;
            m[j] = -band;
        }
        if (j < 0) break;
    }
    return fft_inverse(c);
}

ScalarField gaussian_bump(const GridPtr& grid, double width) {
    if (!(width > 0.0)) throw InvalidParameter("gaussian_bump: width must be positive");
    const int d = grid->dim();
    const int n = grid->n();
    const double L = grid->edge();
    const double h = grid->cell();
    ScalarField f(grid);
    std::vector<int> idx(d, 0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        double rho2 = 0.0;
        for (int j = 0; j < d; ++j) {
            double dx = idx[j] * h - 0.5 * L;
            dx -= L * std::round(dx / L);  // periodic min-image
            rho2 += dx * dx;
        }
        f[i] = std::exp(-rho2 / (2.0 * width * width));
        for (int j = d - 1; j >= 0; --j) {
            if (++idx[j] < n) break;
            idx[j] = 0;
        }
    }
    return f;
}

ScalarField normalized_l2(ScalarField f) {
    const double nrm = lp_norm(f, 2.0);
    if (nrm > 0.0) f *= 1.0 / nrm;
    return f;
}

}  // namespace formbound
