#include <doctest.h>

#include <cmath>

#include "dense_oracle.hpp"
#include "formbound/drift.hpp"
#include "formbound/errors.hpp"
#include "formbound/form_bound.hpp"
#include "formbound/norms.hpp"
#include "formbound/probes.hpp"
#include "formbound/resolvent.hpp"
#include "formbound/spectral.hpp"

using namespace formbound;

namespace {

std::shared_ptr<const DriftField> trig_drift(const GridPtr& g, double amplitude) {
    DriftSpec s;
    s.name = "trig";
    s.kind = DriftKind::smooth_trig;
    s.amplitude = amplitude;
    s.lambda = 1.0;
    return std::make_shared<const DriftField>(make_smooth_trig_drift(g, amplitude, s));
}

std::shared_ptr<const DriftField> hardy_drift(const GridPtr& g, double c) {
    DriftSpec s;
    s.name = "hardy";
    s.kind = DriftKind::hardy;
    s.c = c;
    s.lambda = 1.0;
    s.mollification = {1e6, 0.0};
    return std::make_shared<const DriftField>(make_hardy_drift(g, c, s));
}

std::shared_ptr<const DriftField> zero_drift(const GridPtr& g) { return trig_drift(g, 0.0); }

double rel(const ScalarField& a, const ScalarField& b, double p = 2.0) {
    ScalarField d = a;
    d -= b;
    const double bn = lp_norm(b, p);
    return bn == 0.0 ? lp_norm(d, p) : lp_norm(d, p) / bn;
}

Tolerances tols(ProductRule rule, double tol = 1e-10) {
    Tolerances t;
    t.neumann_tol = tol;
    t.rule = rule;
    return t;
}

}  // namespace

TEST_CASE("contraction_constant closed form") {
    for (double delta : {0.01, 0.25, 0.81})
        CHECK(contraction_constant(delta, 2.0) ==
              doctest::Approx(std::sqrt(delta)).epsilon(1e-12));
    // frozen arbitrary-precision evaluation of the formula
    CHECK(contraction_constant(0.25, 3.0) ==
          doctest::Approx(0.780896665619080016).epsilon(1e-12));
    CHECK(contraction_constant(0.0, 3.0) == 0.0);
    CHECK_THROWS_AS((void)contraction_constant(0.25, 1.5), InvalidParameter);
    CHECK_THROWS_AS((void)contraction_constant(-0.1, 3.0), InvalidParameter);
    // large delta with p far out drives the denominator nonpositive
    CHECK_THROWS_AS((void)contraction_constant(0.9, 8.0), AdmissibilityError);
}

TEST_CASE("sqrt(delta) < 2/p iff c < 1 (200 random draws each side)") {
    Rng rng(41);
    int admissible_checked = 0;
    while (admissible_checked < 200) {
        const double delta = 0.9 * rng.uniform() + 0.005;
        const double p = 2.0 + 4.0 * rng.uniform();
        if (!(std::sqrt(delta) < 2.0 / p)) continue;
        CHECK(contraction_constant(delta, p) < 1.0);
        ++admissible_checked;
    }
    int inadmissible_checked = 0;
    while (inadmissible_checked < 200) {
        const double delta = 0.9 * rng.uniform() + 0.005;
        const double p = 2.0 + 4.0 * rng.uniform();
        if (std::sqrt(delta) < 2.0 / p) continue;
        try {
            CHECK(contraction_constant(delta, p) >= 1.0);
        } catch (const AdmissibilityError&) {
            // nonpositive denominator: the bound is vacuous, also acceptable
        }
        ++inadmissible_checked;
    }
}

TEST_CASE("admissible_p_range") {
    const PRange r = admissible_p_range(0.25);
    CHECK(r.lo == 2.0);
    CHECK(r.hi == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(r.contains(2.0));
    CHECK(r.contains(3.999));
    CHECK_FALSE(r.contains(4.0));
    CHECK(admissible_p_range(0.16).hi == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(std::isinf(admissible_p_range(0.0).hi));
    CHECK_THROWS_AS((void)admissible_p_range(1.0), AdmissibilityError);
    CHECK_THROWS_AS((void)admissible_p_range(1.5), AdmissibilityError);
}

TEST_CASE("ResolventProblem validates inputs") {
    const GridPtr g = make_grid(3, 8, 5.0);
    auto hardy = hardy_drift(g, 0.2);  // delta 0.16, p < 5
    CHECK_THROWS_AS((void)make_problem(hardy, -1.0, 2.0), InvalidParameter);
    CHECK_THROWS_AS((void)make_problem(hardy, 1.0, 1.5), AdmissibilityError);
    CHECK_THROWS_AS((void)make_problem(hardy, 1.0, 5.0), AdmissibilityError);
    CHECK_THROWS_AS((void)make_problem(hardy, 1.0, 3.0, {}, 2.5, std::nullopt),
                    InvalidParameter);
    CHECK_THROWS_AS((void)make_problem(hardy, 1.0, 3.0, {}, 3.5, 6.0), AdmissibilityError);
    CHECK_THROWS_AS((void)make_problem(hardy, 1.0, 3.0, {}, 2.5, 2.8), AdmissibilityError);
    CHECK_NOTHROW((void)make_problem(hardy, 1.0, 3.0, {}, 2.5, 6.0));
}

TEST_CASE("every operator has an exact discrete adjoint") {
    const GridPtr g = make_grid(3, 8, 5.0);
    auto drift = hardy_drift(g, 0.25);
    Rng rng(43);
    for (ProductRule rule : {ProductRule::pointwise, ProductRule::dealias32}) {
        ProblemPtr pr = make_problem(drift, 4.0, 3.0, tols(rule), 2.5, 6.0);
        const ScalarField u = white_field(g, rng);
        const ScalarField v = white_field(g, rng);
        const struct {
            const char* name;
            LinearOp op;
        } cases[] = {{"G", op_Gp(pr)},     {"Q", op_Qp(pr)},   {"T", op_Tp(pr)},
                     {"Gr", op_Gp_r(pr)},  {"Qq", op_Qp_q(pr)}};
        for (const auto& c : cases) {
            const double lhs = inner(c.op.apply(u), v);
            const double rhs = inner(u, c.op.apply_adjoint(v));
            CHECK_MESSAGE(std::abs(lhs - rhs) <= 1e-10 * (std::abs(lhs) + 1e-30),
                          c.name);
        }
    }
}

TEST_CASE("G, Q, T trivial cases") {
    const GridPtr g = make_grid(3, 8, 5.0);
    Rng rng(47);
    const ScalarField f = white_field(g, rng);

    SUBCASE("zero drift annihilates G and T") {
        ProblemPtr pr = make_problem(zero_drift(g), 3.0, 2.0, tols(ProductRule::pointwise));
        CHECK(max_abs(apply_Gp(*pr, f)) == 0.0);
        CHECK(max_abs(apply_Tp(*pr, f)) == 0.0);
    }

    SUBCASE("constant f is killed by G (gradient of the zero mode)") {
        ProblemPtr pr = make_problem(hardy_drift(g, 0.2), 3.0, 3.0, tols(ProductRule::pointwise));
        const ScalarField c(g, 4.2);
        CHECK(max_abs(apply_Gp(*pr, c)) <= 1e-12);
    }

    SUBCASE("unit speed makes Q the plain resolvent") {
        VectorField b(g);
        const double comp = 1.0 / std::sqrt(3.0);
        for (int j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < b[j].size(); ++i) b[j][i] = comp;
        auto d = std::make_shared<DriftField>();
        d->name = "unit";
        d->speed = b.magnitude();
        d->b = std::move(b);
        d->lambda = 10.0;
        d->delta_claimed = 0.1;
        ProblemPtr pr = make_problem(d, 3.0, 4.0, tols(ProductRule::pointwise));
        CHECK(rel(apply_Qp(*pr, f), bessel_apply(3.0, 1.0, f)) <= 1e-13);
    }

    SUBCASE("p = 2 collapses T to b . grad (mu-Delta)^{-1}") {
        auto drift = trig_drift(g, 0.4);
        ProblemPtr pr = make_problem(drift, 5.0, 2.0, tols(ProductRule::pointwise));
        const ScalarField lhs = apply_Tp(*pr, f);
        const VectorField gr = gradient(bessel_apply(5.0, 1.0, f));
        ScalarField rhs(g, 0.0);
        for (int j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < rhs.size(); ++i)
                rhs[i] += drift->b[j][i] * gr[j][i];
        CHECK(rel(lhs, rhs) <= 1e-12);
    }

    SUBCASE("advection equals b . grad u for every p under pointwise products") {
        auto drift = hardy_drift(g, 0.2);
        const ScalarField u = white_field(g, rng);
        ProblemPtr p2 = make_problem(drift, 5.0, 2.0, tols(ProductRule::pointwise));
        ProblemPtr p3 = make_problem(drift, 5.0, 3.0, tols(ProductRule::pointwise));
        CHECK(rel(apply_advection(*p2, u), apply_advection(*p3, u)) <= 1e-11);
    }
}

TEST_CASE("estimate_opnorm_p basics and the dense oracle at n = 8") {
    const GridPtr g = make_grid(3, 8, 5.0);
    Rng rng(53);

    SUBCASE("identity and scalar multiples") {
        LinearOp ident{[](const ScalarField& x) { return x; },
                       [](const ScalarField& x) { return x; }};
        CHECK(estimate_opnorm_p(ident, g, 3.0, 2, 5, rng).value ==
              doctest::Approx(1.0).epsilon(1e-13));
        LinearOp scaled{[](const ScalarField& x) { return -2.5 * ScalarField(x); },
                        [](const ScalarField& x) { return -2.5 * ScalarField(x); }};
        CHECK(estimate_opnorm_p(scaled, g, 2.0, 2, 5, rng).value ==
              doctest::Approx(2.5).epsilon(1e-13));
        CHECK_THROWS_AS((void)estimate_opnorm_p(ident, g, 1.5, 2, 5, rng),
                        InvalidParameter);
    }

    SUBCASE("matches exhaustive dense multi-start within 2%") {
        const ScalarField bump = gaussian_bump(g, 1.0);
        auto apply = [&](const ScalarField& x) {
            ScalarField w = bessel_apply(3.0, 1.0, x);
            for (std::size_t i = 0; i < w.size(); ++i) w[i] *= (1.0 + bump[i]);
            return w;
        };
        auto applyT = [&](const ScalarField& x) {
            ScalarField w = x;
            for (std::size_t i = 0; i < w.size(); ++i) w[i] *= (1.0 + bump[i]);
            return bessel_apply(3.0, 1.0, w);
        };
        const Eigen::MatrixXd A = testing::assemble_dense(apply, g);
        for (double p : {2.0, 3.0}) {
            const double dense = testing::dense_pnorm(A, p, 24, 60, Rng(101));
            const OpNormEstimate est =
                estimate_opnorm_p({apply, applyT}, g, p, 6, 40, rng.split(p));
            CHECK(std::abs(est.value - dense) <= 0.02 * dense);
        }
    }
}

TEST_CASE("neumann_inverse") {
    const GridPtr g = make_grid(3, 8, 5.0);
    Rng rng(59);
    const ScalarField f = colored_field(g, rng, 1.0);

    SUBCASE("zero drift returns g in one term") {
        ProblemPtr pr = make_problem(zero_drift(g), 3.0, 2.0, tols(ProductRule::pointwise));
        const auto [x, rep] = neumann_inverse(*pr, f);
        CHECK(rep.terms_used == 1);
        CHECK(rep.converged);
        CHECK_FALSE(rep.diverged);
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(x[i] == f[i]);
    }

    SUBCASE("forward application recovers the right-hand side") {
        for (ProductRule rule : {ProductRule::pointwise, ProductRule::dealias32}) {
            ProblemPtr pr = make_problem(hardy_drift(g, 0.2), 50.0, 3.0, tols(rule));
            const auto [x, rep] = neumann_inverse(*pr, f);
            CHECK(rep.converged);
            ScalarField recon = x;
            recon += apply_Tp(*pr, x);
            CHECK(rel(recon, f, 3.0) <= 10.0 * pr->tol().neumann_tol);
        }
    }

    SUBCASE("matches the dense solve of (1 + T)") {
        ProblemPtr pr = make_problem(trig_drift(g, 0.3), 20.0, 2.0,
                                     tols(ProductRule::pointwise, 1e-12));
        auto applyT = [&](const ScalarField& v) { return apply_Tp(*pr, v); };
        Eigen::MatrixXd M = testing::assemble_dense(applyT, g);
        M += Eigen::MatrixXd::Identity(M.rows(), M.cols());
        const ScalarField dense = testing::dense_solve(M, f);
        const auto [x, rep] = neumann_inverse(*pr, f);
        CHECK(rep.converged);
        CHECK(rel(x, dense) <= 1e-8);
        // observed contraction ratio is consistent with the T norm estimate
        const double tn =
            estimate_opnorm_p(op_Tp(pr), g, 2.0, 3, 30, rng.split("tn")).value;
        CHECK(rep.last_term_ratio <= tn * 1.5 + 0.05);
    }

    SUBCASE("divergence is detected and flagged, not thrown") {
        // a deliberately mis-declared drift: the claimed bound admits p = 2
        // but the actual field is far too strong for mu this small
        const DriftField big_raw = make_hardy_drift(
            g, 0.2, [] {
                DriftSpec s;
                s.kind = DriftKind::hardy;
                s.c = 0.2;
                s.mollification = {1e6, 0.0};
                return s;
            }());
        auto big = std::make_shared<DriftField>(big_raw);
        big->b *= 40.0;
        big->speed *= 40.0;
        big->delta_claimed = 0.2;  // a lie, which is the point
        ProblemPtr pr = make_problem(big, 0.05, 2.0, tols(ProductRule::pointwise));
        const auto [x, rep] = neumann_inverse(*pr, f);
        CHECK(rep.diverged);
        CHECK_FALSE(rep.converged);
        CHECK(std::isinf(rep.tail_bound));
    }
}

TEST_CASE("theta_apply") {
    const GridPtr g = make_grid(3, 8, 5.0);
    Rng rng(61);
    const ScalarField f = colored_field(g, rng, 1.0);

    SUBCASE("zero drift reduces to the plain resolvent, and 0 maps to 0") {
        ProblemPtr pr = make_problem(zero_drift(g), 7.0, 2.0, tols(ProductRule::pointwise));
        CHECK(rel(theta_apply(*pr, f).u, bessel_apply(7.0, 1.0, f)) <= 1e-14);
        const ScalarField z(g, 0.0);
        CHECK(max_abs(theta_apply(*pr, z).u) == 0.0);
    }

    SUBCASE("matches the dense direct solve of (mu - Delta + b.grad)") {
        for (ProductRule rule : {ProductRule::pointwise, ProductRule::dealias32}) {
            ProblemPtr pr =
                make_problem(trig_drift(g, 0.5), 100.0, 2.0, tols(rule, 1e-12));
            auto forward = [&](const ScalarField& u) { return apply_forward(*pr, u); };
            const Eigen::MatrixXd Op = testing::assemble_dense(forward, g);
            const ScalarField dense = testing::dense_solve(Op, f);
            const ScalarField iter = theta_apply(*pr, f).u;
            CHECK(rel(iter, dense) <= 1e-8);
        }
    }

    SUBCASE("residual property at the stated tolerance") {
        for (ProductRule rule : {ProductRule::pointwise, ProductRule::dealias32}) {
            ProblemPtr pr = make_problem(hardy_drift(g, 0.2), 100.0, 3.0, tols(rule));
            const ThetaResult th = theta_apply(*pr, f);
            CHECK(th.neumann.converged);
            CHECK(rel(apply_forward(*pr, th.u), f, 3.0) <= 10.0 * pr->tol().neumann_tol);
        }
    }

    SUBCASE("theta adjoint is the exact discrete adjoint") {
        ProblemPtr pr =
            make_problem(hardy_drift(g, 0.2), 60.0, 3.0, tols(ProductRule::dealias32));
        const ScalarField u = white_field(g, rng);
        const ScalarField v = white_field(g, rng);
        const double lhs = inner(theta_apply(*pr, u).u, v);
        const double rhs = inner(u, theta_apply_adjoint(*pr, v).u);
        CHECK(std::abs(lhs - rhs) <= 1e-9 * std::abs(lhs));
    }
}

TEST_CASE("theta_factored_apply") {
    const GridPtr g = make_grid(3, 8, 5.0);
    Rng rng(67);
    const ScalarField f = colored_field(g, rng, 1.0);

    SUBCASE("zero drift recombines the fractional powers exactly") {
        ProblemPtr pr =
            make_problem(zero_drift(g), 5.0, 3.0, tols(ProductRule::pointwise), 2.5, 6.0);
        CHECK(rel(theta_factored_apply(*pr, f).u, bessel_apply(5.0, 1.0, f)) <= 1e-10);
    }

    SUBCASE("factored equals plain for several (r, q)") {
        auto drift = hardy_drift(g, 0.2);
        for (auto [r, q] : std::vector<std::pair<double, double>>{
                 {2.5, 6.0}, {2.5, 10.0}, {2.0, 4.0}}) {
            ProblemPtr pr = make_problem(drift, 60.0, 3.0,
                                         tols(ProductRule::dealias32), r, q);
            const ScalarField a = theta_apply(*pr, f).u;
            const ScalarField b = theta_factored_apply(*pr, f).u;
            CHECK(rel(b, a, 3.0) <= 1e-8);
        }
    }

    SUBCASE("missing (r, q) is rejected") {
        ProblemPtr pr = make_problem(hardy_drift(g, 0.2), 60.0, 3.0);
        CHECK_THROWS_AS((void)theta_factored_apply(*pr, f), InvalidParameter);
    }
}

TEST_CASE("pseudo-resolvent and strong-limit defects") {
    const GridPtr g = make_grid(3, 8, 5.0);
    Rng rng(71);
    const ScalarField f = colored_field(g, rng, 1.0);

    SUBCASE("mu = nu gives an identically zero defect") {
        ProblemPtr pr = make_problem(trig_drift(g, 0.4), 30.0, 2.0, tols(ProductRule::pointwise));
        CHECK(pseudo_resolvent_defect(*pr, *pr, f) <= 1e-15);
    }

    SUBCASE("zero drift: exact multiplier identity") {
        ProblemPtr pa = make_problem(zero_drift(g), 11.0, 2.0, tols(ProductRule::pointwise));
        ProblemPtr pb = make_problem(zero_drift(g), 37.0, 2.0, tols(ProductRule::pointwise));
        CHECK(pseudo_resolvent_defect(*pa, *pb, f) <= 1e-12);
    }

    SUBCASE("smooth drift: defect at the tolerance level") {
        auto drift = trig_drift(g, 0.5);
        ProblemPtr pa = make_problem(drift, 50.0, 2.0, tols(ProductRule::dealias32));
        ProblemPtr pb = make_problem(drift, 100.0, 2.0, tols(ProductRule::dealias32));
        CHECK(pseudo_resolvent_defect(*pa, *pb, f) <= 1e-6);
    }

    SUBCASE("mu Theta -> 1: explicit symbol on a single mode") {
        const double L = g->edge();
        const double w = 2.0 * std::numbers::pi / L;
        ScalarField m(g);
        const std::size_t plane = g->size() / g->n();
        for (std::size_t i = 0; i < m.size(); ++i)
            m[i] = std::sin(w * g->cell() * static_cast<double>(i / plane));
        for (double mu : {10.0, 100.0}) {
            ProblemPtr pr = make_problem(zero_drift(g), mu, 2.0, tols(ProductRule::pointwise));
            const double expected = (w * w) / (mu + w * w);
            CHECK(mu_to_identity_defect(*pr, m) == doctest::Approx(expected).epsilon(1e-10));
        }
        // constants are reproduced exactly
        ProblemPtr pr = make_problem(zero_drift(g), 10.0, 2.0, tols(ProductRule::pointwise));
        const ScalarField c(g, 1.0);
        CHECK(mu_to_identity_defect(*pr, c) <= 1e-13);
    }

    SUBCASE("identity defect decreases in mu on a drift problem") {
        auto drift = hardy_drift(g, 0.2);
        Rng prng(5);
        const ScalarField probe = band_limited_field(g, 2, prng);
        double prev = 2.0;
        for (double mu : {100.0, 1000.0, 10000.0}) {
            ProblemPtr pr = make_problem(drift, mu, 3.0, tols(ProductRule::dealias32));
            const double d = mu_to_identity_defect(*pr, probe);
            CHECK(d < prev);
            prev = d;
        }
    }
}

TEST_CASE("quasicontraction: zero drift achieves ratio 1 with mu0 = 0") {
    const GridPtr g = make_grid(3, 8, 5.0);
    ProblemPtr pr = make_problem(zero_drift(g), 25.0, 2.0, tols(ProductRule::pointwise));
    const QuasiContraction qc = quasicontraction_check(pr, 0.0, 2, 8, Rng(73));
    CHECK(qc.ratio == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS((void)quasicontraction_check(pr, 30.0, 2, 8, Rng(73)),
                    InvalidParameter);
}

TEST_CASE("calibrate_mu0") {
    const GridPtr g = make_grid(3, 8, 5.0);
    const std::vector<double> grid_mu{0.5, 1, 2, 4, 8, 16, 32, 64};

    SUBCASE("zero drift calibrates at the first mu") {
        const Calibration cal = calibrate_mu0(zero_drift(g), 0.0, 2.0, grid_mu,
                                              tols(ProductRule::pointwise), 2, 8, Rng(79));
        CHECK(cal.mu0 == 0.5);
        CHECK(cal.c_delta_p == 0.0);
    }

    SUBCASE("hardy drift calibrates and is monotone in the strength") {
        auto d1 = hardy_drift(g, 0.1);
        auto d2 = hardy_drift(g, 0.3);
        const FormBoundEstimate f1 =
            estimate_form_bound(*d1, 2, 80, ProductRule::dealias32, Rng(83));
        const FormBoundEstimate f2 =
            estimate_form_bound(*d2, 2, 80, ProductRule::dealias32, Rng(83));
        const Calibration c1 = calibrate_mu0(d1, f1.delta_hat, 2.0, grid_mu,
                                             tols(ProductRule::dealias32), 2, 12, Rng(89));
        const Calibration c2 = calibrate_mu0(d2, f2.delta_hat, 2.0, grid_mu,
                                             tols(ProductRule::dealias32), 2, 12, Rng(89));
        CHECK(c1.mu0 <= c2.mu0);
        CHECK(c1.rows.size() == grid_mu.size());
    }

    SUBCASE("an empty or unattainable grid fails loudly") {
        CHECK_THROWS_AS((void)calibrate_mu0(zero_drift(g), 0.0, 2.0, {},
                                            tols(ProductRule::pointwise), 2, 8, Rng(1)),
                        InvalidParameter);
        auto strong = hardy_drift(g, 0.3);
        // an absurdly small delta_hat makes the contraction target unreachable
        CHECK_THROWS_AS((void)calibrate_mu0(strong, 1e-9, 2.0, {1e-6},
                                            tols(ProductRule::dealias32), 2, 8, Rng(2)),
                        CalibrationFailure);
    }
}
