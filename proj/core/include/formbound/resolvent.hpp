#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "formbound/constants.hpp"
#include "formbound/drift.hpp"
#include "formbound/opnorm.hpp"
#include "formbound/rng.hpp"

namespace formbound {

struct Tolerances {
    double neumann_tol = 1e-10;
    int neumann_max_terms = 200;
    ProductRule rule = ProductRule::dealias32;
};

/// One application context of Theta(mu, b): holds (mu, p, drift, tolerances)
/// and optional factorization exponents 2 <= r < p < q. Validates the
/// admissibility constraint p < 2/sqrt(delta_claimed) on construction and
/// caches the drift powers (and their fine-grid interpolants under
/// dealiasing).
class ResolventProblem {
  public:
    ResolventProblem(std::shared_ptr<const DriftField> drift, double mu, double p,
                     Tolerances tol = {}, std::optional<double> r = std::nullopt,
                     std::optional<double> q = std::nullopt);

    const GridPtr& grid() const { return drift_->b.grid(); }
    const DriftField& drift() const { return *drift_; }
    double mu() const { return mu_; }
    double p() const { return p_; }
    double r() const;
    double q() const;
    bool has_rq() const { return r_.has_value() && q_.has_value(); }
    const Tolerances& tol() const { return tol_; }

    const VectorField& b_pow() const { return w_.b_pow; }
    const ScalarField& b_comp() const { return w_.b_comp; }
    const GridPtr& fine() const { return fine_; }
    const VectorField& b_pow_fine() const { return b_pow_fine_; }
    const ScalarField& b_comp_fine() const { return b_comp_fine_; }

  private:
    std::shared_ptr<const DriftField> drift_;
    double mu_;
    double p_;
    std::optional<double> r_;
    std::optional<double> q_;
    Tolerances tol_;
    DriftPowers w_;
    GridPtr fine_;             // only set under dealias32
    VectorField b_pow_fine_;
    ScalarField b_comp_fine_;
};

using ProblemPtr = std::shared_ptr<const ResolventProblem>;
ProblemPtr make_problem(std::shared_ptr<const DriftField> drift, double mu, double p,
                        Tolerances tol = {}, std::optional<double> r = std::nullopt,
                        std::optional<double> q = std::nullopt);

/// G_p = b^{2/p} . grad (mu-Delta)^{-1}
ScalarField apply_Gp(const ResolventProblem& pr, const ScalarField& f);
ScalarField apply_Gp_adjoint(const ResolventProblem& pr, const ScalarField& f);
/// Q_p = (mu-Delta)^{-1} |b|^{1-2/p}
ScalarField apply_Qp(const ResolventProblem& pr, const ScalarField& f);
ScalarField apply_Qp_adjoint(const ResolventProblem& pr, const ScalarField& f);
/// T_p = b^{2/p} . grad (mu-Delta)^{-1} |b|^{1-2/p}
ScalarField apply_Tp(const ResolventProblem& pr, const ScalarField& f);
ScalarField apply_Tp_adjoint(const ResolventProblem& pr, const ScalarField& f);
/// Factorized pieces G_p(r) = b^{2/p} . grad (mu-Delta)^{-1/2-1/r} and
/// Q_p(q) = (mu-Delta)^{-1/2+1/q} |b|^{1-2/p}.
ScalarField apply_Gp_r(const ResolventProblem& pr, const ScalarField& f);
ScalarField apply_Qp_q(const ResolventProblem& pr, const ScalarField& f);

/// The advection b . grad u realized as |b|^{1-2/p} (b^{2/p} . grad u) with
/// the problem's product rule; with pointwise products this is exactly
/// b . grad u for every p.
ScalarField apply_advection(const ResolventProblem& pr, const ScalarField& u);
/// (mu - Delta + b . grad) u
ScalarField apply_forward(const ResolventProblem& pr, const ScalarField& u);

struct NeumannReport {
    int terms_used = 0;
    double last_term_ratio = 0.0;
    double tail_bound = 0.0;  // geometric estimate; infinite when ratio >= 1
    bool converged = false;
    bool diverged = false;  // ratio >= 1 for 3 consecutive terms
};

/// (1 + T_p)^{-1} g by the Neumann series sum_k (-T_p)^k g.
std::pair<ScalarField, NeumannReport> neumann_inverse(const ResolventProblem& pr,
                                                      const ScalarField& g);
std::pair<ScalarField, NeumannReport> neumann_inverse_adjoint(const ResolventProblem& pr,
                                                              const ScalarField& g);

struct ThetaResult {
    ScalarField u;
    NeumannReport neumann;
};

/// Theta(mu,b) f = (mu-Delta)^{-1} f - Q_p (1+T_p)^{-1} G_p f.
ThetaResult theta_apply(const ResolventProblem& pr, const ScalarField& f);
ThetaResult theta_apply_adjoint(const ResolventProblem& pr, const ScalarField& f);
/// Theta through the factorized representation (requires r, q).
ThetaResult theta_factored_apply(const ResolventProblem& pr, const ScalarField& f);

LinearOp op_Gp(ProblemPtr pr);
LinearOp op_Qp(ProblemPtr pr);
LinearOp op_Tp(ProblemPtr pr);
LinearOp op_Gp_r(ProblemPtr pr);
LinearOp op_Qp_q(ProblemPtr pr);
LinearOp op_theta(ProblemPtr pr);

/// ||Theta(mu)f - Theta(nu)f - (nu-mu) Theta(mu) Theta(nu) f||_p / ||f||_p.
double pseudo_resolvent_defect(const ResolventProblem& pr_mu,
                               const ResolventProblem& pr_nu, const ScalarField& f);

/// ||mu Theta(mu) f - f||_p / ||f||_p.
double mu_to_identity_defect(const ResolventProblem& pr, const ScalarField& f);

struct QuasiContraction {
    double ratio = 0.0;  // ||Theta||_p * (mu - mu0)
    double mu0_used = 0.0;
    OpNormEstimate norm;
};
QuasiContraction quasicontraction_check(ProblemPtr pr, double mu0, int probes, int iters,
                                        Rng rng);

struct CalibrationRow {
    double mu = 0.0;
    double t_norm = 0.0;
    double neumann_ratio = 0.0;
    bool admissible = false;
};
struct Calibration {
    double mu0 = 0.0;
    double delta_hat = 0.0;
    double c_delta_p = 0.0;
    std::vector<CalibrationRow> rows;
};

/// Smallest grid mu with (a) estimated ||T_p|| <= c_{delta_hat,p} and (b) a
/// convergent Neumann probe; throws CalibrationFailure when none qualifies.
Calibration calibrate_mu0(std::shared_ptr<const DriftField> drift, double delta_hat,
                          double p, const std::vector<double>& mu_grid, Tolerances tol,
                          int probes, int iters, Rng rng);

}  // namespace formbound
