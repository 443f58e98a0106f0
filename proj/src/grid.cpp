#include "cbf/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cbf {

std::size_t TorusGrid::size() const {
    std::size_t s = 1;
    for (int a = 0; a < d; ++a) s *= static_cast<std::size_t>(n);
    return s;
}

double TorusGrid::cell_volume() const {
    double w = 1.0;
    for (int a = 0; a < d; ++a) w *= L / n;
    return w;
}

std::size_t TorusGrid::index(const int* i) const {
    std::size_t idx = 0;
    for (int a = 0; a < d; ++a) idx = idx * n + static_cast<std::size_t>(i[a]);
    return idx;
}

GridPtr make_grid(int d, int n, double L) {
    if (d != 2 && d != 3)
        throw std::invalid_argument("make_grid: d must be 2 or 3, got " + std::to_string(d));
    if (n < 8) throw std::invalid_argument("make_grid: n must be >= 8, got " + std::to_string(n));
    if (n % 2 != 0)
        throw std::invalid_argument("make_grid: n must be even, got " + std::to_string(n));
    if (!(L > 0.0)) throw std::invalid_argument("make_grid: L must be positive");

    auto g = std::make_shared<TorusGrid>();
    g->d = d;
    g->n = n;
    g->L = L;
    g->freq.resize(n);
    g->wavenumbers.resize(n);
    g->axis_keep.resize(n);
    const double scale = 2.0 * M_PI / L;
    const int kmax = n / 3;  // keep |k| <= floor(n/3)
    for (int m = 0; m < n; ++m) {
        int k = (m < n / 2) ? m : m - n;
        g->freq[m] = k;
        g->wavenumbers[m] = scale * k;
        g->axis_keep[m] = (std::abs(k) <= kmax);
    }
    return g;
}

}  // namespace cbf
