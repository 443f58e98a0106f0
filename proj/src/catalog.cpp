#include "cbf/catalog.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "cbf/spectral.hpp"

namespace cbf::catalog {

namespace {

using PointFn = std::function<double(const std::array<double, 3>&)>;

ScalarField sample(const GridPtr& grid, const PointFn& fn) {
    const TorusGrid& g = *grid;
    const double h = g.dx();
    std::vector<double> vals(g.size());
    std::array<double, 3> x{0.0, 0.0, 0.0};
    if (g.d == 2) {
        std::size_t idx = 0;
        for (int i0 = 0; i0 < g.n; ++i0) {
            x[0] = h * i0;
            for (int i1 = 0; i1 < g.n; ++i1, ++idx) {
                x[1] = h * i1;
                vals[idx] = fn(x);
            }
        }
    } else {
        std::size_t idx = 0;
        for (int i0 = 0; i0 < g.n; ++i0) {
            x[0] = h * i0;
            for (int i1 = 0; i1 < g.n; ++i1) {
                x[1] = h * i1;
                for (int i2 = 0; i2 < g.n; ++i2, ++idx) {
                    x[2] = h * i2;
                    vals[idx] = fn(x);
                }
            }
        }
    }
    return ScalarField::from_physical(grid, std::move(vals));
}

// 2D: u = (d psi / dy, -d psi / dx), exactly solenoidal
VectorField from_stream(const GridPtr& grid, const PointFn& psi) {
    ScalarField s = sample(grid, psi);
    VectorField gs = gradient(s);
    std::vector<ScalarField> comps;
    comps.push_back(gs.comp(1));
    const auto& sx = gs.comp(0).spectral();
    std::vector<std::complex<double>> neg(sx.size());
    for (std::size_t i = 0; i < sx.size(); ++i) neg[i] = -sx[i];
    comps.push_back(ScalarField::from_spectral(grid, std::move(neg)));
    return VectorField::from_components(std::move(comps), /*solenoidal=*/true);
}

// 3D: u = curl A
VectorField from_potential(const GridPtr& grid, const PointFn& a0, const PointFn& a1,
                           const PointFn& a2) {
    VectorField g0 = gradient(sample(grid, a0));
    VectorField g1 = gradient(sample(grid, a1));
    VectorField g2 = gradient(sample(grid, a2));
    auto minus = [&](const ScalarField& a, const ScalarField& b) {
        return add_scaled(a, 1.0, b, -1.0);
    };
    std::vector<ScalarField> comps;
    comps.push_back(minus(g2.comp(1), g1.comp(2)));  // d2/dy - d1/dz
    comps.push_back(minus(g0.comp(2), g2.comp(0)));  // d0/dz - d2/dx
    comps.push_back(minus(g1.comp(0), g0.comp(1)));  // d1/dx - d0/dy
    return VectorField::from_components(std::move(comps), /*solenoidal=*/true);
}

ScalarField band_limit(ScalarField s, int kmax) {
    const TorusGrid& g = s.grid();
    auto& sp = s.mutable_spectral();
    std::size_t idx = 0;
    auto keep = [&](int m) { return std::abs(g.freq[m]) <= kmax; };
    if (g.d == 2) {
        for (int i0 = 0; i0 < g.n; ++i0)
            for (int i1 = 0; i1 < g.n; ++i1, ++idx)
                if (!keep(i0) || !keep(i1)) sp[idx] = {0.0, 0.0};
    } else {
        for (int i0 = 0; i0 < g.n; ++i0)
            for (int i1 = 0; i1 < g.n; ++i1)
                for (int i2 = 0; i2 < g.n; ++i2, ++idx)
                    if (!keep(i0) || !keep(i1) || !keep(i2)) sp[idx] = {0.0, 0.0};
    }
    return s;
}

VectorField band_limit(VectorField f, int kmax) {
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(f.dim()));
    for (int a = 0; a < f.dim(); ++a) comps.push_back(band_limit(f.comp(a), kmax));
    return VectorField::from_components(std::move(comps), f.solenoidal());
}

VectorField random_raw(const GridPtr& grid, int kmax, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<ScalarField> comps;
    for (int a = 0; a < grid->d; ++a) {
        std::vector<double> vals(grid->size());
        for (double& v : vals) v = dist(rng);
        comps.push_back(ScalarField::from_physical(grid, std::move(vals)));
    }
    return band_limit(VectorField::from_components(std::move(comps)), kmax);
}

VectorField normalized(VectorField f, double norm) {
    double n0 = norm_l2(f);
    if (n0 == 0.0) throw std::runtime_error("catalog: degenerate random field");
    return scaled(f, norm / n0);
}

}  // namespace

VectorField named_field(const std::string& name, const GridPtr& grid) {
    const double th = 2.0 * M_PI / grid->L;
    if (name == "zero") return VectorField::zero(grid);
    if (grid->d == 2) {
        if (name == "tg1")
            return from_stream(grid, [th](const std::array<double, 3>& x) {
                return std::sin(th * x[0]) * std::sin(th * x[1]) / th;
            });
        if (name == "tg2")
            return from_stream(grid, [th](const std::array<double, 3>& x) {
                return (std::sin(th * x[0]) * std::sin(th * x[1]) +
                        0.5 * std::sin(2.0 * th * x[0]) * std::sin(th * x[1]) +
                        0.25 * std::cos(th * x[0]) * std::sin(2.0 * th * x[1])) /
                       th;
            });
        if (name == "band1")
            return from_stream(grid, [th](const std::array<double, 3>& x) {
                return (std::sin(th * x[0]) * std::cos(2.0 * th * x[1]) +
                        0.3 * std::cos(3.0 * th * x[0]) * std::sin(th * x[1])) /
                       th;
            });
    } else {
        if (name == "abc1")
            return from_potential(
                grid,
                [th](const std::array<double, 3>& x) { return std::sin(th * x[2]) / th; },
                [th](const std::array<double, 3>& x) { return std::sin(th * x[0]) / th; },
                [th](const std::array<double, 3>& x) { return std::sin(th * x[1]) / th; });
        if (name == "abc2")
            return from_potential(
                grid,
                [th](const std::array<double, 3>& x) {
                    return (std::cos(th * x[1]) + 0.5 * std::sin(th * x[2])) / th;
                },
                [th](const std::array<double, 3>& x) {
                    return (std::cos(th * x[2]) + 0.5 * std::sin(th * x[0])) / th;
                },
                [th](const std::array<double, 3>& x) {
                    return (std::cos(th * x[0]) + 0.5 * std::sin(th * x[1])) / th;
                });
    }
    throw std::invalid_argument("catalog: unknown field '" + name + "' for d = " +
                                std::to_string(grid->d));
}

std::vector<std::string> field_names(int d) {
    if (d == 2) return {"zero", "tg1", "tg2", "band1"};
    return {"zero", "abc1", "abc2"};
}

ScalarField named_gspace(const std::string& name, const GridPtr& grid) {
    const double th = 2.0 * M_PI / grid->L;
    if (name == "one")
        return sample(grid, [](const std::array<double, 3>&) { return 1.0; });
    if (name == "two_plus_cosx1")
        return sample(grid, [th](const std::array<double, 3>& x) {
            return 2.0 + std::cos(th * x[0]);
        });
    throw std::invalid_argument("catalog: unknown g spatial factor '" + name + "'");
}

VectorField random_solenoidal(const GridPtr& grid, int kmax, std::uint64_t seed, double norm) {
    return normalized(leray_project(random_raw(grid, kmax, seed)), norm);
}

VectorField random_vector(const GridPtr& grid, int kmax, std::uint64_t seed, double norm) {
    return normalized(random_raw(grid, kmax, seed), norm);
}

VectorField random_gradient(const GridPtr& grid, int kmax, std::uint64_t seed, double norm) {
    ScalarField q = random_scalar(grid, kmax, seed, 1.0);
    return normalized(gradient(q), norm);
}

ScalarField random_scalar(const GridPtr& grid, int kmax, std::uint64_t seed, double norm) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> vals(grid->size());
    for (double& v : vals) v = dist(rng);
    ScalarField out = band_limit(ScalarField::from_physical(grid, std::move(vals)), kmax);
    double n0 = norm_l2(out);
    if (n0 == 0.0) throw std::runtime_error("catalog: degenerate random scalar");
    auto& sp = out.mutable_spectral();
    for (auto& z : sp) z *= norm / n0;
    return out;
}

}  // namespace cbf::catalog
