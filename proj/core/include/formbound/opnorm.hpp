#pragma once

#include <functional>
#include <vector>

#include "formbound/field.hpp"
#include "formbound/rng.hpp"

namespace formbound {

/// A field-to-field map with its adjoint w.r.t. the weighted L^2 inner
/// product. Adjoints are exact at the discrete level by construction.
struct LinearOp {
    std::function<ScalarField(const ScalarField&)> apply;
    std::function<ScalarField(const ScalarField&)> apply_adjoint;
};

struct OpNormEstimate {
    double value = 0.0;  // best ||A x||_p over unit x: certified lower bound
    bool converged = false;
    double last_rel_change = 0.0;
    int iters_used = 0;
};

/// Boyd-Higham p-norm power method: x <- psi_{p'}(A* psi_p(A x)) with the
/// p / p' duality maps, multi-start (a constant start plus random ones plus
/// optional user-supplied starts). Returns the best ratio achieved.
OpNormEstimate estimate_opnorm_p(const LinearOp& op, const GridPtr& grid, double p,
                                 int probes, int iters, Rng rng, double rtol = 1e-4,
                                 const std::vector<ScalarField>* extra_starts = nullptr);

}  // namespace formbound
