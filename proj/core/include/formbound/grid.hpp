#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace formbound {

/// Uniform periodic grid on the torus [0,L)^d, d >= 3, n points per axis
/// (n even). Owns the Fourier wavenumber lattice k = 2*pi*m/L,
/// m in {-n/2, ..., n/2-1} per axis.
class TorusGrid {
  public:
    static constexpr std::size_t default_memory_budget = std::size_t(2) << 30;

    TorusGrid(int dim, int points_per_axis, double edge_length,
              std::size_t memory_budget_bytes = default_memory_budget);

    int dim() const { return d_; }
    int n() const { return n_; }
    double edge() const { return L_; }

    std::size_t size() const { return size_; }            // n^d
    std::size_t spectral_size() const { return sp_size_; } // n^{d-1} * (n/2+1)
    int last_size() const { return n_ / 2 + 1; }           // r2c last axis

    double cell() const { return L_ / n_; }                // h
    double cell_volume() const { return cell_vol_; }       // h^d
    double volume() const { return vol_; }                 // L^d

    /// Wavenumber for a full-axis index (0..n-1); Nyquist carries its full
    /// magnitude -pi*n/L. Valid for even (radial) symbols.
    double k_even(int idx) const { return k_even_[idx]; }
    /// Wavenumber for differentiation symbols: odd in m, zero at Nyquist so
    /// real fields stay real.
    double k_odd(int idx) const { return k_odd_[idx]; }
    /// Same, for the half-stored last axis (0..n/2).
    double k_even_last(int idx) const { return k_even_[idx]; }
    double k_odd_last(int idx) const { return idx == n_ / 2 ? 0.0 : k_even_[idx]; }

    /// Smallest nonzero |k|^2 and largest |k|^2 on the lattice.
    double ksq_min() const;
    double ksq_max() const;

    /// Physical coordinate of index i along an axis (0 <= i < n).
    double coord(int i) const { return i * cell(); }

    bool same_geometry(const TorusGrid& o) const {
        return d_ == o.d_ && n_ == o.n_ && L_ == o.L_;
    }

  private:
    int d_;
    int n_;
    double L_;
    std::size_t size_;
    std::size_t sp_size_;
    double vol_;
    double cell_vol_;
    std::vector<double> k_even_;
    std::vector<double> k_odd_;
};

using GridPtr = std::shared_ptr<const TorusGrid>;

GridPtr make_grid(int dim, int points_per_axis, double edge_length,
                  std::size_t memory_budget_bytes = TorusGrid::default_memory_budget);

}  // namespace formbound
