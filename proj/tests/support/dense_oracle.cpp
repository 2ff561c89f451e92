#include "dense_oracle.hpp"

#include <cmath>

namespace formbound::testing {

Eigen::MatrixXd assemble_dense(const FieldMap& op, const GridPtr& grid) {
    const auto n = static_cast<Eigen::Index>(grid->size());
    Eigen::MatrixXd A(n, n);
    ScalarField e(grid, 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
        e[static_cast<std::size_t>(j)] = 1.0;
        const ScalarField col = op(e);
        for (Eigen::Index i = 0; i < n; ++i) A(i, j) = col[static_cast<std::size_t>(i)];
        e[static_cast<std::size_t>(j)] = 0.0;
    }
    return A;
}

Eigen::VectorXd to_vector(const ScalarField& f) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(f.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = f[static_cast<std::size_t>(i)];
    return v;
}

ScalarField to_field(const GridPtr& grid, const Eigen::VectorXd& v) {
    ScalarField f(grid);
    for (Eigen::Index i = 0; i < v.size(); ++i) f[static_cast<std::size_t>(i)] = v(i);
    return f;
}

ScalarField dense_solve(const Eigen::MatrixXd& A, const ScalarField& rhs) {
    const Eigen::VectorXd x = A.partialPivLu().solve(to_vector(rhs));
    return to_field(rhs.grid(), x);
}

double dense_sym_eig_max(const Eigen::MatrixXd& A) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    return es.eigenvalues().maxCoeff();
}

namespace {

Eigen::VectorXd dual_map(const Eigen::VectorXd& y, double p) {
    if (p == 2.0) return y;
    Eigen::VectorXd z(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double a = std::abs(y(i));
        z(i) = a == 0.0 ? 0.0 : std::copysign(std::pow(a, p - 1.0), y(i));
    }
    return z;
}

double pnorm(const Eigen::VectorXd& v, double p) {
    if (p == 2.0) return v.norm();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v(i)), p);
    return std::pow(acc, 1.0 / p);
}

}  // namespace

double dense_pnorm(const Eigen::MatrixXd& A, double p, int starts, int iters, Rng rng) {
    const double pd = p / (p - 1.0);
    const Eigen::MatrixXd At = A.transpose();
    double best = 0.0;
    for (int s = 0; s < starts; ++s) {
        Rng stream = rng.split(static_cast<std::uint64_t>(s));
        Eigen::VectorXd x(A.cols());
        if (s == 0)
            x.setOnes();
        else
            for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = stream.gaussian();
        x /= pnorm(x, p);
        double prev = -1.0;
        for (int it = 0; it < iters; ++it) {
            const Eigen::VectorXd y = A * x;
            const double gamma = pnorm(y, p);
            best = std::max(best, gamma);
            if (gamma == 0.0) break;
            const Eigen::VectorXd z = At * dual_map(y / gamma, p);
            if (prev >= 0.0 && std::abs(gamma - prev) <= 1e-12 * gamma) break;
            prev = gamma;
            Eigen::VectorXd xn = dual_map(z, pd);
            const double nn = pnorm(xn, p);
            if (nn == 0.0) break;
            x = xn / nn;
        }
    }
    return best;
}

}  // namespace formbound::testing
