#include "formbound/grid.hpp"

#include <cmath>
#include <numbers>

#include "formbound/errors.hpp"

namespace formbound {

TorusGrid::TorusGrid(int dim, int points_per_axis, double edge_length,
                     std::size_t memory_budget_bytes)
    : d_(dim), n_(points_per_axis), L_(edge_length) {
    if (d_ < 3) throw InvalidParameter("TorusGrid: dimension must be >= 3");
    if (n_ < 4 || n_ % 2 != 0) throw InvalidParameter("TorusGrid: n must be even and >= 4");
    if (!(L_ > 0.0)) throw InvalidParameter("TorusGrid: edge length must be positive");

    size_ = 1;
    for (int j = 0; j < d_; ++j) {
        if (size_ > memory_budget_bytes / sizeof(double) / static_cast<std::size_t>(n_))
            throw InvalidParameter("TorusGrid: n^d exceeds the memory budget");
        size_ *= static_cast<std::size_t>(n_);
    }
    sp_size_ = size_ / n_ * (n_ / 2 + 1);
    vol_ = std::pow(L_, d_);
    cell_vol_ = std::pow(L_ / n_, d_);

    const double dk = 2.0 * std::numbers::pi / L_;
    k_even_.resize(n_);
    k_odd_.resize(n_);
    for (int i = 0; i < n_; ++i) {
        const int m = i <= n_ / 2 ? i : i - n_;   // Nyquist i == n/2 -> +n/2 magnitude
        k_even_[i] = dk * m;
        k_odd_[i] = (i == n_ / 2) ? 0.0 : dk * (i < n_ / 2 ? i : i - n_);
    }
}

double TorusGrid::ksq_min() const {
    const double k1 = 2.0 * std::numbers::pi / L_;
    return k1 * k1;
}

double TorusGrid::ksq_max() const {
    const double kn = std::numbers::pi * n_ / L_;
    return d_ * kn * kn;
}

GridPtr make_grid(int dim, int points_per_axis, double edge_length,
                  std::size_t memory_budget_bytes) {
    return std::make_shared<const TorusGrid>(dim, points_per_axis, edge_length,
                                             memory_budget_bytes);
}

}  // namespace formbound
