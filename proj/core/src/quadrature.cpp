#include "formbound/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "formbound/errors.hpp"
#include "formbound/spectral.hpp"

namespace formbound {

GaussRule gauss_legendre_01(int m) {
    GaussRule r;
    r.nodes.resize(m);
    r.weights.resize(m);
    const double pi = std::numbers::pi;
    for (int i = 0; i < m; ++i) {
        // Newton on P_m from the Chebyshev-like initial guess
        double x = std::cos(pi * (i + 0.75) / (m + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= m; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            pp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = 0.5 * (x + 1.0);
        r.weights[i] = 1.0 / ((1.0 - x * x) * pp * pp);
    }
    return r;
}

namespace {

// Symbol value of the split integral at kappa using precomputed per-node data.
struct SplitRule {
    std::vector<double> head_a;  // mu * x^{1/(1-alpha)}
    std::vector<double> tail_b;  // x^{1/alpha}
    std::vector<double> w;
    double c_head;
    double c_tail;
    double front;

    SplitRule(double mu, double alpha, int m) {
        const GaussRule gr = gauss_legendre_01(m);
        head_a.resize(m);
        tail_b.resize(m);
        w = gr.weights;
        for (int i = 0; i < m; ++i) {
            head_a[i] = mu * std::pow(gr.nodes[i], 1.0 / (1.0 - alpha));
            tail_b[i] = std::pow(gr.nodes[i], 1.0 / alpha);
        }
        c_head = std::pow(mu, 1.0 - alpha) / (1.0 - alpha);
        c_tail = std::pow(mu, 1.0 - alpha) / alpha;
        front = std::sin(std::numbers::pi * alpha) / std::numbers::pi;
    }

    double eval(double mu, double kappa) const {
        double head = 0.0, tail = 0.0;
        const double mk = mu + kappa;
        for (std::size_t i = 0; i < w.size(); ++i) {
            head += w[i] / (head_a[i] + mk);
            tail += w[i] / (mu + mk * tail_b[i]);
        }
        return front * (c_head * head + c_tail * tail);
    }
};

void validate(double mu, double alpha) {
    if (!(mu > 0.0)) throw InvalidParameter("bessel_apply_quadrature: mu must be positive");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InvalidParameter("bessel_apply_quadrature: alpha must lie in (0, 1)");
}

}  // namespace

double bessel_symbol_quadrature(double mu, double alpha, double kappa, int nodes) {
    validate(mu, alpha);
    return SplitRule(mu, alpha, nodes).eval(mu, kappa);
}

ScalarField bessel_apply_quadrature(double mu, double alpha, const ScalarField& u,
                                    double rtol, int max_nodes, QuadratureInfo* info) {
    validate(mu, alpha);
    const GridPtr grid = u.grid();

    SpectralField c = fft_forward(u);
    const std::vector<double> ksq = ksq_values(*grid);
    std::vector<double> prev;
    std::vector<double> cur(c.size());
    int m = 16;
    double change = std::numeric_limits<double>::infinity();
    bool converged = false;
    while (true) {
        const SplitRule rule(mu, alpha, m);
        for (std::size_t i = 0; i < ksq.size(); ++i) cur[i] = rule.eval(mu, ksq[i]);
        if (!prev.empty()) {
            change = 0.0;
            for (std::size_t i = 0; i < cur.size(); ++i) {
                const double d = std::abs(cur[i] - prev[i]) / std::abs(cur[i]);
                change = std::max(change, d);
            }
            if (change <= rtol) {
                converged = true;
                break;
            }
        }
        if (2 * m > max_nodes) break;
        prev = cur;
        m *= 2;
    }
    if (info) {
        info->nodes_per_segment = m;
        info->error_estimate = change;
        info->converged = converged;
    }
    if (!converged && !info)
        throw ConvergenceFailure("bessel_apply_quadrature: node budget exhausted", change);

    for (std::size_t i = 0; i < cur.size(); ++i) c[i] *= cur[i];
    return fft_inverse(c);
}

}  // namespace formbound
