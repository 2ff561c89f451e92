#pragma once

#include <Eigen/Dense>
#include <functional>

#include "formbound/field.hpp"
#include "formbound/rng.hpp"

namespace formbound::testing {

using FieldMap = std::function<ScalarField(const ScalarField&)>;

/// Dense matrix of a field-to-field map, assembled column by column from the
/// canonical basis. Ground truth for the iterative paths at n = 8 scale.
Eigen::MatrixXd assemble_dense(const FieldMap& op, const GridPtr& grid);

Eigen::VectorXd to_vector(const ScalarField& f);
ScalarField to_field(const GridPtr& grid, const Eigen::VectorXd& v);

/// Direct solve A x = rhs (partial-pivot LU).
ScalarField dense_solve(const Eigen::MatrixXd& A, const ScalarField& rhs);

/// Largest eigenvalue of a symmetric matrix.
double dense_sym_eig_max(const Eigen::MatrixXd& A);

/// Matrix p-norm lower bound by exhaustive multi-start Boyd iteration on the
/// dense matrix. Uniform grid weights cancel, so the plain vector p-norm
/// matches the field convention.
double dense_pnorm(const Eigen::MatrixXd& A, double p, int starts, int iters,
                   Rng rng);

}  // namespace formbound::testing
