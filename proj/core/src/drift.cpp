#include "formbound/drift.hpp"

#include <cmath>
#include <numbers>

#include "formbound/errors.hpp"
#include "formbound/field_io.hpp"
#include "formbound/norms.hpp"
#include "formbound/spectral.hpp"

namespace formbound {

namespace {

// Walk physical indices; fn(flat, idx-array).
template <class F>
void visit_points(const TorusGrid& g, F&& fn) {
    const int d = g.dim();
    const int n = g.n();
    std::vector<int> idx(d, 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        fn(i, idx);
        for (int j = d - 1; j >= 0; --j) {
            if (++idx[j] < n) break;
            idx[j] = 0;
        }
    }
}

double min_image(double dx, double L) { return dx - L * std::round(dx / L); }

DriftField finalize(std::string name, VectorField b, double lambda, double delta) {
    DriftField out;
    out.name = std::move(name);
    out.speed = b.magnitude();
    out.b = std::move(b);
    out.lambda = lambda;
    out.delta_claimed = delta;
    if (!(out.lambda > 0.0)) throw InvalidParameter("drift: lambda must be positive");
    if (!(out.delta_claimed > 0.0))
        throw InvalidParameter("drift: delta_claimed must be positive");
    for (int j = 0; j < out.b.dim(); ++j)
        if (!out.b[j].is_finite()) throw InvalidParameter("drift: non-finite component");
    return out;
}

}  // namespace

VectorField mollify_drift(const VectorField& raw, double cutoff, double epsilon) {
    if (epsilon < 0.0) throw InvalidParameter("mollify_drift: epsilon must be nonnegative");
    const GridPtr grid = raw.grid();
    VectorField cut = raw;
    if (cutoff > 0.0) {
        const int d = grid->dim();
        const double L = grid->edge();
        const double h = grid->cell();
        const ScalarField speed = raw.magnitude();
        visit_points(*grid, [&](std::size_t i, const std::vector<int>& idx) {
            double rho2 = 0.0;
            for (int j = 0; j < d; ++j) {
                const double dx = min_image(idx[j] * h - 0.5 * L, L);
                rho2 += dx * dx;
            }
            if (rho2 > cutoff * cutoff || speed[i] > cutoff)
                for (int j = 0; j < d; ++j) cut[j][i] = 0.0;
        });
    }
    if (epsilon > 0.0)
        for (int j = 0; j < cut.dim(); ++j) cut[j] = heat_smooth(epsilon, cut[j]);
    return cut;
}

DriftField make_hardy_drift(const GridPtr& grid, double c, const DriftSpec& spec) {
    if (!(c > 0.0)) throw InvalidParameter("make_hardy_drift: c must be positive");
    const int d = grid->dim();
    const double L = grid->edge();
    const double h = grid->cell();
    VectorField raw(grid);
    // center offset by half a cell so |b| stays finite before capping
    visit_points(*grid, [&](std::size_t i, const std::vector<int>& idx) {
        double x[16];
        double rho2 = 0.0;
        for (int j = 0; j < d; ++j) {
            x[j] = min_image(idx[j] * h - (0.5 * L + 0.5 * h), L);
            rho2 += x[j] * x[j];
        }
        const double s = c / rho2;
        for (int j = 0; j < d; ++j) raw[j][i] = s * x[j];
    });
    VectorField b = mollify_drift(raw, spec.mollification.cutoff, spec.mollification.epsilon);
    const double hardy = 4.0 * c * c / ((d - 2.0) * (d - 2.0));
    return finalize(spec.name, std::move(b), spec.lambda,
                    spec.delta_claimed.value_or(hardy));
}

DriftField make_smooth_trig_drift(const GridPtr& grid, double amplitude,
                                  const DriftSpec& spec) {
    const int d = grid->dim();
    const double L = grid->edge();
    const double h = grid->cell();
    const double w = 2.0 * std::numbers::pi / L;
    VectorField raw(grid);
    visit_points(*grid, [&](std::size_t i, const std::vector<int>& idx) {
        for (int j = 0; j < d; ++j) {
            const double xa = idx[(j + 1) % d] * h;
            const double xb = idx[(j + 2) % d] * h;
            raw[j][i] = amplitude * std::sin(w * xa) * std::cos(w * xb);
        }
    });
    VectorField b = mollify_drift(raw, spec.mollification.cutoff, spec.mollification.epsilon);
    // rigorous ceiling for bounded drifts: ||b||_inf^2 / lambda
    const double sup = max_abs(b.magnitude());
    const double delta = spec.delta_claimed.value_or(
        amplitude == 0.0 ? 1e-30 : sup * sup / spec.lambda);
    return finalize(spec.name, std::move(b), spec.lambda, delta);
}

DriftField load_drift(const GridPtr& grid, const DriftSpec& spec) {
    if (static_cast<int>(spec.paths.size()) != grid->dim())
        throw InvalidParameter("load_drift: need one FBND1 file per component");
    std::vector<ScalarField> comp;
    comp.reserve(spec.paths.size());
    for (const auto& path : spec.paths) {
        ScalarField f = read_fbnd(path);
        if (!f.grid()->same_geometry(*grid))
            throw InvalidParameter("load_drift: grid mismatch in " + path);
        comp.push_back(ScalarField(grid, std::move(f.values())));
    }
    VectorField b = mollify_drift(VectorField(std::move(comp)), spec.mollification.cutoff,
                                  spec.mollification.epsilon);
    const double sup = max_abs(b.magnitude());
    const double delta =
        spec.delta_claimed.value_or(sup == 0.0 ? 1e-30 : sup * sup / spec.lambda);
    return finalize(spec.name, std::move(b), spec.lambda, delta);
}

DriftField make_drift(const GridPtr& grid, const DriftSpec& spec) {
    switch (spec.kind) {
        case DriftKind::hardy:
            return make_hardy_drift(grid, spec.c, spec);
        case DriftKind::smooth_trig:
            return make_smooth_trig_drift(grid, spec.amplitude, spec);
        case DriftKind::file:
            return load_drift(grid, spec);
    }
    throw InvalidParameter("make_drift: unknown kind");
}

DriftPowers drift_power(const DriftField& drift, double p) {
    if (!(p >= 2.0)) throw InvalidParameter("drift_power: p must be >= 2");
    const GridPtr grid = drift.b.grid();
    DriftPowers out{VectorField(grid), ScalarField(grid)};
    const double e_pow = 2.0 / p - 1.0;  // <= 0
    const double e_comp = 1.0 - 2.0 / p;
    const int d = grid->dim();
    for (std::size_t i = 0; i < drift.speed.size(); ++i) {
        const double s = drift.speed[i];
        if (s > 0.0) {
            const double w = (e_pow == 0.0) ? 1.0 : std::pow(s, e_pow);
            for (int j = 0; j < d; ++j) out.b_pow[j][i] = w * drift.b[j][i];
            out.b_comp[i] = (e_comp == 0.0) ? 1.0 : std::pow(s, e_comp);
        } else {
            for (int j = 0; j < d; ++j) out.b_pow[j][i] = 0.0;
            out.b_comp[i] = (e_comp == 0.0) ? 1.0 : 0.0;  // |b|^0 := 1 at p = 2
        }
    }
    return out;
}

}  // namespace formbound
