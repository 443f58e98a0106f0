#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace cbf {

/// Uniform collocation grid on the periodic torus [0,L)^d, d = 2 or 3,
/// with n points per axis. Wavenumber tables are the integer frequencies
/// in standard FFT layout {0,1,...,n/2-1,-n/2,...,-1} scaled by 2*pi/L.
/// The dealias mask keeps a mode iff every axis frequency satisfies
/// |k_i| <= n/3 (2/3 rule).
struct TorusGrid {
    int d = 0;
    int n = 0;
    double L = 0.0;

    std::vector<double> wavenumbers;  // size n, scaled by 2*pi/L
    std::vector<int> freq;            // size n, integer frequencies
    std::vector<bool> axis_keep;      // size n, per-axis 2/3-rule mask

    std::size_t size() const;  // n^d
    double dx() const { return L / n; }
    double cell_volume() const;  // (L/n)^d

    // row-major index helpers; i.size() == d
    std::size_t index(const int* i) const;
};

using GridPtr = std::shared_ptr<const TorusGrid>;

/// Builds the grid. Rejects odd n, n < 8, L <= 0, d not in {2,3}.
GridPtr make_grid(int d, int n, double L);

}  // namespace cbf
