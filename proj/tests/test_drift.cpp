#include <doctest.h>

#include <cmath>

#include "dense_oracle.hpp"
#include "formbound/drift.hpp"
#include "formbound/errors.hpp"
#include "formbound/form_bound.hpp"
#include "formbound/norms.hpp"
#include "formbound/probes.hpp"
#include "formbound/spectral.hpp"

using namespace formbound;

namespace {

DriftField constant_speed_drift(const GridPtr& g, double beta, double lambda) {
    VectorField b(g);
    const double comp = beta / std::sqrt(static_cast<double>(g->dim()));
    for (int j = 0; j < g->dim(); ++j)
        for (std::size_t i = 0; i < b[j].size(); ++i) b[j][i] = comp;
    DriftField d;
    d.name = "const";
    d.speed = b.magnitude();
    d.b = std::move(b);
    d.lambda = lambda;
    d.delta_claimed = beta * beta / lambda;
    return d;
}

DriftSpec hardy_spec(double c, double cutoff, double eps) {
    DriftSpec s;
    s.name = "hardy";
    s.kind = DriftKind::hardy;
    s.c = c;
    s.lambda = 1.0;
    s.mollification = {cutoff, eps};
    return s;
}

}  // namespace

TEST_CASE("hardy drift carries the Hardy constant as delta_claimed") {
    const GridPtr g = make_grid(3, 16, 10.0);
    const DriftField d = make_hardy_drift(g, 0.2, hardy_spec(0.2, 1e6, 0.0));
    CHECK(d.delta_claimed == doctest::Approx(0.16).epsilon(1e-14));
    CHECK(d.speed.is_finite());

    const DriftField tiny = make_hardy_drift(g, 1e-9, hardy_spec(1e-9, 1e6, 0.0));
    CHECK(max_abs(tiny.speed) <= 1e-9 * 2.0 / g->cell() * 1.01);
}

TEST_CASE("mollification caps, shrinks sup norms, and converges") {
    const GridPtr g = make_grid(3, 16, 10.0);

    SUBCASE("inactive cutoff leaves a bounded field unchanged") {
        DriftSpec s;
        s.kind = DriftKind::smooth_trig;
        s.amplitude = 0.5;
        const DriftField d = make_smooth_trig_drift(g, 0.5, s);
        const VectorField m = mollify_drift(d.b, 100.0, 0.0);
        for (int j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < m[j].size(); ++i) CHECK(m[j][i] == d.b[j][i]);
    }

    SUBCASE("indicator bounds the sup norm by the level") {
        const DriftField raw = make_hardy_drift(g, 0.5, hardy_spec(0.5, 0.0, 0.0));
        const VectorField cut = mollify_drift(raw.b, 2.0, 0.0);
        CHECK(max_abs(cut.magnitude()) <= 2.0 + 1e-12);
        const VectorField smoothed = mollify_drift(raw.b, 2.0, 0.01);
        CHECK(max_abs(smoothed.magnitude()) <= 2.0 * (1.0 + 1e-6));
    }

    SUBCASE("larger eps shrinks the sup norm monotonically") {
        const DriftField raw = make_hardy_drift(g, 0.3, hardy_spec(0.3, 0.0, 0.0));
        double prev = max_abs(mollify_drift(raw.b, 3.0, 0.02).magnitude());
        for (double eps : {0.05, 0.1, 0.2}) {
            const double cur = max_abs(mollify_drift(raw.b, 3.0, eps).magnitude());
            CHECK(cur <= prev * (1.0 + 1e-9));
            prev = cur;
        }
    }

    SUBCASE("the mollified sequence approaches the raw field in L2") {
        const DriftField raw = make_hardy_drift(g, 0.2, hardy_spec(0.2, 0.0, 0.0));
        double prev = -1.0;
        for (auto [cutoff, eps] : std::vector<std::pair<double, double>>{
                 {1.0, 0.1}, {2.0, 0.02}, {4.0, 0.004}, {1e6, 0.0}}) {
            const VectorField m = mollify_drift(raw.b, cutoff, eps);
            double dist2 = 0.0;
            for (int j = 0; j < 3; ++j) {
                ScalarField diff = m[j];
                diff -= raw.b[j];
                const double nj = lp_norm(diff, 2.0);
                dist2 += nj * nj;
            }
            const double dist = std::sqrt(dist2);
            if (prev >= 0.0) CHECK(dist <= prev * (1.0 + 1e-12));
            prev = dist;
        }
        CHECK(prev == 0.0);  // final level is the raw field exactly
    }

    SUBCASE("negative eps is rejected") {
        const DriftField raw = make_hardy_drift(g, 0.2, hardy_spec(0.2, 0.0, 0.0));
        CHECK_THROWS_AS((void)mollify_drift(raw.b, 1.0, -0.1), InvalidParameter);
    }
}

TEST_CASE("drift_power identities") {
    const GridPtr g = make_grid(3, 8, 5.0);

    SUBCASE("p = 2 collapses to (b, 1)") {
        const DriftField d = make_hardy_drift(g, 0.2, hardy_spec(0.2, 1e6, 0.0));
        const DriftPowers w = drift_power(d, 2.0);
        for (int j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < w.b_pow[j].size(); ++i)
                CHECK(w.b_pow[j][i] == d.b[j][i]);
        for (std::size_t i = 0; i < w.b_comp.size(); ++i) CHECK(w.b_comp[i] == 1.0);
    }

    SUBCASE("constant speed produces constant powers") {
        const DriftField d = constant_speed_drift(g, 1.7, 1.0);
        const DriftPowers w = drift_power(d, 3.0);
        CHECK(max_abs(w.b_pow.magnitude()) ==
              doctest::Approx(std::pow(1.7, 2.0 / 3.0)).epsilon(1e-12));
        CHECK(w.b_comp[0] == doctest::Approx(std::pow(1.7, 1.0 / 3.0)).epsilon(1e-12));
    }

    SUBCASE("|b^{2/p}|^p equals |b|^2 pointwise") {
        const DriftField d = make_hardy_drift(g, 0.3, hardy_spec(0.3, 4.0, 0.01));
        const DriftPowers w = drift_power(d, 3.0);
        const ScalarField mag = w.b_pow.magnitude();
        for (std::size_t i = 0; i < mag.size(); ++i) {
            const double lhs = std::pow(mag[i], 3.0);
            const double rhs = d.speed[i] * d.speed[i];
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
        // the reconstruction |b_pow| * b_comp = |b| wherever |b| > 0
        for (std::size_t i = 0; i < mag.size(); ++i)
            if (d.speed[i] > 1e-12)
                CHECK(mag[i] * w.b_comp[i] == doctest::Approx(d.speed[i]).epsilon(1e-10));
        CHECK_THROWS_AS((void)drift_power(d, 1.5), InvalidParameter);
    }
}

TEST_CASE("estimate_form_bound: zero drift, exact constant case") {
    const GridPtr g = make_grid(3, 8, 5.0);

    SUBCASE("b = 0 gives delta_hat = 0") {
        DriftSpec s;
        s.kind = DriftKind::smooth_trig;
        s.amplitude = 0.0;
        const DriftField d = make_smooth_trig_drift(g, 0.0, s);
        const FormBoundEstimate fb =
            estimate_form_bound(d, 2, 10, ProductRule::pointwise, Rng(5));
        CHECK(fb.delta_hat == 0.0);
        CHECK(fb.converged);
    }

    SUBCASE("constant speed: delta_hat -> beta^2/lambda (zero mode)") {
        for (double lambda : {1.0, 50.0}) {
            const DriftField d = constant_speed_drift(g, 0.8, lambda);
            const FormBoundEstimate fb =
                estimate_form_bound(d, 2, 200, ProductRule::pointwise, Rng(6));
            CHECK(fb.delta_hat == doctest::Approx(0.64 / lambda).epsilon(1e-6));
        }
    }

    SUBCASE("weak variant: constant speed gives beta/sqrt(lambda)") {
        const DriftField d = constant_speed_drift(g, 0.8, 4.0);
        const FormBoundEstimate fb =
            estimate_weak_form_bound(d, 2, 200, ProductRule::pointwise, Rng(7));
        CHECK(fb.delta_hat == doctest::Approx(0.8 / 2.0).epsilon(1e-6));
    }

    SUBCASE("probe/iteration validation") {
        const DriftField d = constant_speed_drift(g, 0.5, 1.0);
        CHECK_THROWS_AS(
            (void)estimate_form_bound(d, 0, 10, ProductRule::pointwise, Rng(1)),
            InvalidParameter);
    }
}

TEST_CASE("estimate_form_bound agrees with the dense eigensolve oracle at n = 8") {
    const GridPtr g = make_grid(3, 8, 5.0);
    DriftSpec s;
    s.kind = DriftKind::smooth_trig;
    s.amplitude = 0.9;
    const DriftField d = make_smooth_trig_drift(g, 0.9, s);

    for (ProductRule rule : {ProductRule::pointwise, ProductRule::dealias32}) {
        auto applyA = [&](const ScalarField& v) {
            ScalarField w = bessel_apply(d.lambda, 0.5, v);
            ScalarField w2(g);
            for (std::size_t i = 0; i < w2.size(); ++i)
                w2[i] = d.speed[i] * d.speed[i];
            w = multiply(w2, w, rule);
            return bessel_apply(d.lambda, 0.5, w);
        };
        const Eigen::MatrixXd A = testing::assemble_dense(applyA, g);
        CHECK((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-11);
        const double exact = testing::dense_sym_eig_max(A);
        const FormBoundEstimate fb = estimate_form_bound(d, 4, 300, rule, Rng(8), 1e-12);
        CHECK(fb.delta_hat <= exact * (1.0 + 1e-9));  // certified lower bound
        CHECK(fb.delta_hat >= exact * 0.98);          // within 2%
    }
}

TEST_CASE("form bound scales exactly quadratically under drift scaling") {
    const GridPtr g = make_grid(3, 8, 5.0);
    const DriftField base = make_hardy_drift(g, 0.2, hardy_spec(0.2, 4.0, 0.05));
    DriftField scaled = base;
    scaled.b *= 3.0;
    scaled.speed *= 3.0;
    scaled.delta_claimed = 0.9;
    const FormBoundEstimate a =
        estimate_form_bound(base, 2, 60, ProductRule::pointwise, Rng(9));
    const FormBoundEstimate b =
        estimate_form_bound(scaled, 2, 60, ProductRule::pointwise, Rng(9));
    CHECK(b.delta_hat == doctest::Approx(9.0 * a.delta_hat).epsilon(1e-12));
}

TEST_CASE("hardy form bound stays below the Hardy ceiling and refines stably") {
    const double ceiling = 0.16;
    double prev = -1.0;
    for (int n : {16, 32}) {
        const GridPtr g = make_grid(3, n, 10.0);
        const DriftField d = make_hardy_drift(g, 0.2, hardy_spec(0.2, 1e6, 0.0));
        const FormBoundEstimate fb =
            estimate_form_bound(d, 3, 150, ProductRule::dealias32, Rng(10));
        CHECK(fb.delta_hat <= ceiling * 1.1);
        CHECK(fb.delta_hat >= 0.02);  // the machinery sees the singular core
        if (prev > 0.0) CHECK(std::abs(fb.delta_hat - prev) <= 0.35 * prev);
        prev = fb.delta_hat;
    }
}

TEST_CASE("weak class constants") {
    SUBCASE("m_3 matches the closed form") {
        CHECK(weak_class_md(3) == doctest::Approx(1.97498855833251875).epsilon(1e-12));
        CHECK(std::abs(weak_class_md(3) - 1.9751) <= 1e-3);
        CHECK_THROWS_AS((void)weak_class_md(2), InvalidParameter);
    }
    SUBCASE("delta = 0 gives the full exponent window") {
        const WeakClassConstants w = weak_class_constants(3, 0.0);
        CHECK(w.p_minus == doctest::Approx(1.0));
        CHECK(std::isinf(w.p_plus));
    }
    SUBCASE("m_d delta = 1 degenerates to p = 2") {
        const double delta = 1.0 / weak_class_md(3);
        const WeakClassConstants w = weak_class_constants(3, delta);
        CHECK(w.p_minus == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(w.p_plus == doctest::Approx(2.0).epsilon(1e-6));
    }
    SUBCASE("m_d delta > 1 is inadmissible") {
        CHECK_THROWS_AS((void)weak_class_constants(3, 0.7), AdmissibilityError);
    }
    SUBCASE("ordering 1 < p- < 2 < p+ inside the window") {
        for (double delta : {0.05, 0.2, 0.4}) {
            const WeakClassConstants w = weak_class_constants(3, delta);
            CHECK(w.p_minus > 1.0);
            CHECK(w.p_minus < 2.0);
            CHECK(w.p_plus > 2.0);
        }
    }
}
