#include "cbf/spectral.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace cbf {

namespace {

using cd = std::complex<double>;

// Iterates over all modes, handing the callback the flat index and the
// effective wavenumber vector (n/2 frequency zeroed).
template <typename Fn>
void for_each_mode(const TorusGrid& g, Fn&& fn) {
    const int n = g.n;
    std::array<double, 3> k{0.0, 0.0, 0.0};
    if (g.d == 2) {
        std::size_t idx = 0;
        for (int i0 = 0; i0 < n; ++i0) {
            k[0] = (i0 == n / 2) ? 0.0 : g.wavenumbers[i0];
            for (int i1 = 0; i1 < n; ++i1, ++idx) {
                k[1] = (i1 == n / 2) ? 0.0 : g.wavenumbers[i1];
                fn(idx, k);
            }
        }
    } else {
        std::size_t idx = 0;
        for (int i0 = 0; i0 < n; ++i0) {
            k[0] = (i0 == n / 2) ? 0.0 : g.wavenumbers[i0];
            for (int i1 = 0; i1 < n; ++i1) {
                k[1] = (i1 == n / 2) ? 0.0 : g.wavenumbers[i1];
                for (int i2 = 0; i2 < n; ++i2, ++idx) {
                    k[2] = (i2 == n / 2) ? 0.0 : g.wavenumbers[i2];
                    fn(idx, k);
                }
            }
        }
    }
}

template <typename Fn>
void for_each_mode_keep(const TorusGrid& g, Fn&& fn) {
    const int n = g.n;
    if (g.d == 2) {
        std::size_t idx = 0;
        for (int i0 = 0; i0 < n; ++i0) {
            bool k0 = g.axis_keep[i0];
            for (int i1 = 0; i1 < n; ++i1, ++idx) fn(idx, k0 && g.axis_keep[i1]);
        }
    } else {
        std::size_t idx = 0;
        for (int i0 = 0; i0 < n; ++i0) {
            bool k0 = g.axis_keep[i0];
            for (int i1 = 0; i1 < n; ++i1) {
                bool k01 = k0 && g.axis_keep[i1];
                for (int i2 = 0; i2 < n; ++i2, ++idx) fn(idx, k01 && g.axis_keep[i2]);
            }
        }
    }
}

}  // namespace

VectorField gradient(const ScalarField& s) {
    const TorusGrid& g = s.grid();
    const auto& sp = s.spectral();
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(g.d));
    for (int a = 0; a < g.d; ++a) {
        std::vector<cd> out(sp.size());
        for_each_mode(g, [&](std::size_t idx, const std::array<double, 3>& k) {
            out[idx] = cd(0.0, k[static_cast<std::size_t>(a)]) * sp[idx];
        });
        comps.push_back(ScalarField::from_spectral(s.grid_ptr(), std::move(out)));
    }
    return VectorField::from_components(std::move(comps), /*solenoidal=*/false);
}

ScalarField divergence(const VectorField& v) {
    const TorusGrid& g = v.grid();
    std::vector<cd> out(g.size(), cd(0.0, 0.0));
    for (int a = 0; a < g.d; ++a) {
        const auto& sp = v.comp(a).spectral();
        for_each_mode(g, [&](std::size_t idx, const std::array<double, 3>& k) {
            out[idx] += cd(0.0, k[static_cast<std::size_t>(a)]) * sp[idx];
        });
    }
    return ScalarField::from_spectral(v.grid_ptr(), std::move(out));
}

ScalarField laplacian(const ScalarField& s) {
    const TorusGrid& g = s.grid();
    const auto& sp = s.spectral();
    std::vector<cd> out(sp.size());
    for_each_mode(g, [&](std::size_t idx, const std::array<double, 3>& k) {
        double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        out[idx] = -k2 * sp[idx];
    });
    return ScalarField::from_spectral(s.grid_ptr(), std::move(out));
}

VectorField laplacian(const VectorField& v) {
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(v.dim()));
    for (int a = 0; a < v.dim(); ++a) comps.push_back(laplacian(v.comp(a)));
    return VectorField::from_components(std::move(comps), v.solenoidal());
}

VectorField leray_project(const VectorField& v) {
    const TorusGrid& g = v.grid();
    const int d = g.d;
    std::vector<std::vector<cd>> out(static_cast<std::size_t>(d));
    std::vector<const std::vector<cd>*> in(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        in[static_cast<std::size_t>(a)] = &v.comp(a).spectral();
        out[static_cast<std::size_t>(a)].resize(g.size());
    }
    for_each_mode(g, [&](std::size_t idx, const std::array<double, 3>& k) {
        double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if (k2 == 0.0) {
            for (int a = 0; a < d; ++a) out[static_cast<std::size_t>(a)][idx] = (*in[static_cast<std::size_t>(a)])[idx];
            return;
        }
        cd kdotv(0.0, 0.0);
        for (int a = 0; a < d; ++a) kdotv += k[static_cast<std::size_t>(a)] * (*in[static_cast<std::size_t>(a)])[idx];
        for (int a = 0; a < d; ++a)
            out[static_cast<std::size_t>(a)][idx] =
                (*in[static_cast<std::size_t>(a)])[idx] - k[static_cast<std::size_t>(a)] * kdotv / k2;
    });
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a)
        comps.push_back(ScalarField::from_spectral(v.grid_ptr(), std::move(out[static_cast<std::size_t>(a)])));
    VectorField w = VectorField::from_components(std::move(comps), /*solenoidal=*/true);
    return w;
}

VectorField leray_complement(const VectorField& v) {
    VectorField p = leray_project(v);
    VectorField r = add_scaled(v, 1.0, p, -1.0);
    r.set_solenoidal(false);
    return r;
}

ScalarField dealias(const ScalarField& s) {
    const TorusGrid& g = s.grid();
    std::vector<cd> out = s.spectral();
    for_each_mode_keep(g, [&](std::size_t idx, bool keep) {
        if (!keep) out[idx] = cd(0.0, 0.0);
    });
    return ScalarField::from_spectral(s.grid_ptr(), std::move(out));
}

VectorField dealias(const VectorField& v) {
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(v.dim()));
    for (int a = 0; a < v.dim(); ++a) comps.push_back(dealias(v.comp(a)));
    return VectorField::from_components(std::move(comps), v.solenoidal());
}

double norm_l2(const ScalarField& s) {
    const auto& p = s.physical();
    double acc = 0.0;
    for (double x : p) acc += x * x;
    return std::sqrt(acc * s.grid().cell_volume());
}

double norm_l2(const VectorField& v) {
    double acc = 0.0;
    for (int a = 0; a < v.dim(); ++a) {
        const auto& p = v.comp(a).physical();
        for (double x : p) acc += x * x;
    }
    return std::sqrt(acc * v.grid().cell_volume());
}

double norm_h1_semi(const ScalarField& s) {
    const TorusGrid& g = s.grid();
    const auto& sp = s.spectral();
    double acc = 0.0;
    for_each_mode(g, [&](std::size_t idx, const std::array<double, 3>& k) {
        double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        acc += k2 * std::norm(sp[idx]);
    });
    double vol = 1.0;
    for (int a = 0; a < g.d; ++a) vol *= g.L;
    return std::sqrt(acc * vol);
}

double norm_h1_semi(const VectorField& v) {
    double acc = 0.0;
    for (int a = 0; a < v.dim(); ++a) {
        double s = norm_h1_semi(v.comp(a));
        acc += s * s;
    }
    return std::sqrt(acc);
}

double norm_lp(const ScalarField& s, double p) {
    if (p < 1.0) throw std::invalid_argument("norm_lp: p must be >= 1");
    const auto& ph = s.physical();
    double acc = 0.0;
    for (double x : ph) acc += std::pow(std::abs(x), p);
    return std::pow(acc * s.grid().cell_volume(), 1.0 / p);
}

double norm_lp(const VectorField& v, double p) {
    if (p < 1.0) throw std::invalid_argument("norm_lp: p must be >= 1");
    const int d = v.dim();
    std::vector<const std::vector<double>*> ph(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) ph[static_cast<std::size_t>(a)] = &v.comp(a).physical();
    double acc = 0.0;
    const std::size_t npts = v.grid().size();
    for (std::size_t i = 0; i < npts; ++i) {
        double m2 = 0.0;
        for (int a = 0; a < d; ++a) {
            double x = (*ph[static_cast<std::size_t>(a)])[i];
            m2 += x * x;
        }
        acc += std::pow(m2, 0.5 * p);
    }
    return std::pow(acc * v.grid().cell_volume(), 1.0 / p);
}

double norm_linf(const ScalarField& s) {
    const auto& ph = s.physical();
    double m = 0.0;
    for (double x : ph) m = std::max(m, std::abs(x));
    return m;
}

double norm_linf(const VectorField& v) {
    const int d = v.dim();
    std::vector<const std::vector<double>*> ph(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) ph[static_cast<std::size_t>(a)] = &v.comp(a).physical();
    double m = 0.0;
    const std::size_t npts = v.grid().size();
    for (std::size_t i = 0; i < npts; ++i) {
        double m2 = 0.0;
        for (int a = 0; a < d; ++a) {
            double x = (*ph[static_cast<std::size_t>(a)])[i];
            m2 += x * x;
        }
        m = std::max(m, m2);
    }
    return std::sqrt(m);
}

double inner(const ScalarField& a, const ScalarField& b) {
    const auto& pa = a.physical();
    const auto& pb = b.physical();
    double acc = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) acc += pa[i] * pb[i];
    return acc * a.grid().cell_volume();
}

double inner(const VectorField& a, const VectorField& b) {
    double acc = 0.0;
    for (int c = 0; c < a.dim(); ++c) acc += inner(a.comp(c), b.comp(c));
    return acc;
}

double divergence_max_spectral(const VectorField& v) {
    ScalarField div = divergence(v);
    const auto& sp = div.spectral();
    double m = 0.0;
    for (const auto& z : sp) m = std::max(m, std::abs(z));
    return m;
}

double spectral_max(const VectorField& v) {
    double m = 0.0;
    for (int a = 0; a < v.dim(); ++a) {
        const auto& sp = v.comp(a).spectral();
        for (const auto& z : sp) m = std::max(m, std::abs(z));
    }
    return m;
}

ScalarField add_scaled(const ScalarField& a, double ca, const ScalarField& b, double cb) {
    const auto& sa = a.spectral();
    const auto& sb = b.spectral();
    std::vector<cd> out(sa.size());
    for (std::size_t i = 0; i < sa.size(); ++i) out[i] = ca * sa[i] + cb * sb[i];
    return ScalarField::from_spectral(a.grid_ptr(), std::move(out));
}

VectorField add_scaled(const VectorField& a, double ca, const VectorField& b, double cb) {
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(a.dim()));
    for (int c = 0; c < a.dim(); ++c) comps.push_back(add_scaled(a.comp(c), ca, b.comp(c), cb));
    return VectorField::from_components(std::move(comps), a.solenoidal() && b.solenoidal());
}

VectorField scaled(const VectorField& a, double c) {
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(a.dim()));
    for (int i = 0; i < a.dim(); ++i) {
        const auto& sa = a.comp(i).spectral();
        std::vector<cd> out(sa.size());
        for (std::size_t j = 0; j < sa.size(); ++j) out[j] = c * sa[j];
        comps.push_back(ScalarField::from_spectral(a.grid_ptr(), std::move(out)));
    }
    return VectorField::from_components(std::move(comps), a.solenoidal());
}

ScalarField resample(const ScalarField& s, const GridPtr& target) {
    const TorusGrid& go = s.grid();
    const TorusGrid& gt = *target;
    if (go.d != gt.d || go.L != gt.L)
        throw std::invalid_argument("resample: dimension/period mismatch");
    if (go.n == gt.n) return s;
    const auto& sp = s.spectral();
    std::vector<cd> out(gt.size(), cd(0.0, 0.0));
    const int kcap = std::min(go.n, gt.n) / 2;  // |k| < kcap survives
    const int d = go.d;
    std::array<int, 3> it{0, 0, 0};
    std::function<void(int)> rec = [&](int axis) {
        if (axis == d) {
            std::array<int, 3> io{0, 0, 0};
            for (int a = 0; a < d; ++a) {
                int k = (it[static_cast<std::size_t>(a)] < gt.n / 2)
                            ? it[static_cast<std::size_t>(a)]
                            : it[static_cast<std::size_t>(a)] - gt.n;
                if (std::abs(k) >= kcap) return;
                io[static_cast<std::size_t>(a)] = (k >= 0) ? k : k + go.n;
            }
            out[gt.index(it.data())] = sp[go.index(io.data())];
            return;
        }
        for (it[static_cast<std::size_t>(axis)] = 0; it[static_cast<std::size_t>(axis)] < gt.n;
             ++it[static_cast<std::size_t>(axis)])
            rec(axis + 1);
    };
    rec(0);
    return ScalarField::from_spectral(target, std::move(out));
}

VectorField resample(const VectorField& v, const GridPtr& target) {
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(v.dim()));
    for (int a = 0; a < v.dim(); ++a) comps.push_back(resample(v.comp(a), target));
    return VectorField::from_components(std::move(comps), v.solenoidal());
}

}  // namespace cbf
