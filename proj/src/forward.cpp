#include "cbf/forward.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "cbf/detail/pointwise.hpp"
#include "cbf/spectral.hpp"

namespace cbf {

namespace {

using cd = std::complex<double>;
using detail::mag_power;
using detail::physical_comps;

// f(x) * g(x,t) transformed and dealiased, ready for spectral assembly
VectorField forcing_term(const VectorField& f, const std::vector<double>& gvals) {
    const GridPtr grid = f.grid_ptr();
    auto fp = physical_comps(f);
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(f.dim()));
    for (int a = 0; a < f.dim(); ++a) {
        std::vector<double> vals(grid->size());
        const auto& fa = *fp[static_cast<std::size_t>(a)];
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = fa[i] * gvals[i];
        comps.push_back(ScalarField::from_physical(grid, std::move(vals)));
    }
    return dealias(VectorField::from_components(std::move(comps)));
}

// P[ fg - convection(u) - beta C(u) ], dealiased and solenoidal
VectorField explicit_part(const VectorField& u, const VectorField& f,
                          const std::vector<double>& gvals, const CbfParams& p) {
    VectorField conv = convection(u);
    VectorField damp = dealias(damping(u, p.r));
    VectorField fg = forcing_term(f, gvals);
    VectorField sum = add_scaled(fg, 1.0, conv, -1.0);
    sum = add_scaled(sum, 1.0, damp, -p.beta);
    return leray_project(sum);
}

// per-mode decay factors exp(-(mu |k|^2 + alpha) dt)
std::vector<double> decay_factors(const TorusGrid& g, const CbfParams& p, double dt) {
    std::vector<double> e(g.size());
    const int n = g.n;
    auto keff = [&](int m) { return (m == n / 2) ? 0.0 : g.wavenumbers[m]; };
    if (g.d == 2) {
        std::size_t idx = 0;
        for (int i0 = 0; i0 < n; ++i0) {
            double k0 = keff(i0);
            for (int i1 = 0; i1 < n; ++i1, ++idx) {
                double k1 = keff(i1);
                e[idx] = std::exp(-(p.mu * (k0 * k0 + k1 * k1) + p.alpha) * dt);
            }
        }
    } else {
        std::size_t idx = 0;
        for (int i0 = 0; i0 < n; ++i0) {
            double k0 = keff(i0);
            for (int i1 = 0; i1 < n; ++i1) {
                double k1 = keff(i1);
                for (int i2 = 0; i2 < n; ++i2, ++idx) {
                    double k2 = keff(i2);
                    e[idx] =
                        std::exp(-(p.mu * (k0 * k0 + k1 * k1 + k2 * k2) + p.alpha) * dt);
                }
            }
        }
    }
    return e;
}

std::vector<std::size_t> record_indices(int nt, const RecordPolicy& rec) {
    std::set<std::size_t> idx;
    idx.insert(0);
    idx.insert(static_cast<std::size_t>(nt));
    switch (rec.mode) {
        case RecordPolicy::Mode::EveryStep:
            for (int s = 0; s <= nt; ++s) idx.insert(static_cast<std::size_t>(s));
            break;
        case RecordPolicy::Mode::Stride:
            for (int s = 0; s <= nt; s += std::max(1, rec.stride))
                idx.insert(static_cast<std::size_t>(s));
            break;
        case RecordPolicy::Mode::Landmarks: {
            for (int j = 1; j < 16; ++j)
                idx.insert(static_cast<std::size_t>(std::llround(double(j) * nt / 16.0)));
            for (int j = 1; j < 64; ++j)
                idx.insert(static_cast<std::size_t>(std::llround(double(j) * nt / 64.0)));
            for (int s = 1; s < nt; s *= 2) idx.insert(static_cast<std::size_t>(s));
            break;
        }
    }
    return {idx.begin(), idx.end()};
}

}  // namespace

RecordPolicy RecordPolicy::landmarks(bool grad_p, bool u_t) {
    RecordPolicy r;
    r.mode = Mode::Landmarks;
    r.record_grad_p = grad_p;
    r.record_u_t = u_t;
    return r;
}

RecordPolicy RecordPolicy::every_step(bool grad_p, bool u_t) {
    RecordPolicy r;
    r.mode = Mode::EveryStep;
    r.record_grad_p = grad_p;
    r.record_u_t = u_t;
    return r;
}

RecordPolicy RecordPolicy::strided(int s, bool grad_p, bool u_t) {
    RecordPolicy r;
    r.mode = Mode::Stride;
    r.stride = s;
    r.record_grad_p = grad_p;
    r.record_u_t = u_t;
    return r;
}

VectorField damping(const VectorField& u, double r) {
    if (r < 1.0) throw std::invalid_argument("damping: r must be >= 1");
    const GridPtr grid = u.grid_ptr();
    const int d = u.dim();
    auto up = physical_comps(u);
    const std::size_t npts = grid->size();
    std::vector<std::vector<double>> out(static_cast<std::size_t>(d),
                                         std::vector<double>(npts));
    for (std::size_t i = 0; i < npts; ++i) {
        double m2 = 0.0;
        for (int a = 0; a < d; ++a) {
            double x = (*up[static_cast<std::size_t>(a)])[i];
            m2 += x * x;
        }
        double fac = mag_power(m2, r);
        for (int a = 0; a < d; ++a)
            out[static_cast<std::size_t>(a)][i] = fac * (*up[static_cast<std::size_t>(a)])[i];
    }
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a)
        comps.push_back(ScalarField::from_physical(grid, std::move(out[static_cast<std::size_t>(a)])));
    return VectorField::from_components(std::move(comps));
}

VectorField damping_jacobian_apply(const VectorField& u, const VectorField& w, double r) {
    if (r < 1.0) throw std::invalid_argument("damping_jacobian_apply: r must be >= 1");
    const GridPtr grid = u.grid_ptr();
    const int d = u.dim();
    auto up = physical_comps(u);
    auto wp = physical_comps(w);
    const std::size_t npts = grid->size();
    std::vector<std::vector<double>> out(static_cast<std::size_t>(d),
                                         std::vector<double>(npts, 0.0));
    if (r == 1.0) {
        for (int a = 0; a < d; ++a)
            for (std::size_t i = 0; i < npts; ++i)
                out[static_cast<std::size_t>(a)][i] = (*wp[static_cast<std::size_t>(a)])[i];
    } else {
        for (std::size_t i = 0; i < npts; ++i) {
            double m2 = 0.0, udotw = 0.0;
            for (int a = 0; a < d; ++a) {
                double ux = (*up[static_cast<std::size_t>(a)])[i];
                m2 += ux * ux;
                udotw += ux * (*wp[static_cast<std::size_t>(a)])[i];
            }
            if (m2 == 0.0) continue;  // zero branch for every r > 1
            double fac1 = mag_power(m2, r);                  // |u|^{r-1}
            double fac2 = (r - 1.0) * mag_power(m2, r - 2.0);  // (r-1)|u|^{r-3}
            for (int a = 0; a < d; ++a)
                out[static_cast<std::size_t>(a)][i] =
                    fac1 * (*wp[static_cast<std::size_t>(a)])[i] +
                    fac2 * udotw * (*up[static_cast<std::size_t>(a)])[i];
        }
    }
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a)
        comps.push_back(ScalarField::from_physical(grid, std::move(out[static_cast<std::size_t>(a)])));
    return VectorField::from_components(std::move(comps));
}

VectorField convection(const VectorField& u) {
    const GridPtr grid = u.grid_ptr();
    const int d = u.dim();
    const std::size_t npts = grid->size();
    auto up = physical_comps(u);

    // physical samples of all first derivatives
    std::vector<std::vector<double>> du(static_cast<std::size_t>(d * d));
    for (int i = 0; i < d; ++i) {
        VectorField gi = gradient(u.comp(i));
        for (int j = 0; j < d; ++j) du[static_cast<std::size_t>(i * d + j)] = gi.comp(j).physical();
    }

    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        // advective form (u.grad)u_i
        std::vector<double> adv(npts, 0.0);
        for (int j = 0; j < d; ++j) {
            const auto& uj = *up[static_cast<std::size_t>(j)];
            const auto& dij = du[static_cast<std::size_t>(i * d + j)];
            for (std::size_t x = 0; x < npts; ++x) adv[x] += uj[x] * dij[x];
        }
        ScalarField adv_f = ScalarField::from_physical(grid, std::move(adv));

        // divergence form: sum_j d_j (u_i u_j)
        std::vector<cd> divspec(npts, cd(0.0, 0.0));
        for (int j = 0; j < d; ++j) {
            std::vector<double> prod(npts);
            const auto& ui = *up[static_cast<std::size_t>(i)];
            const auto& uj = *up[static_cast<std::size_t>(j)];
            for (std::size_t x = 0; x < npts; ++x) prod[x] = ui[x] * uj[x];
            ScalarField pf = ScalarField::from_physical(grid, std::move(prod));
            VectorField gp = gradient(pf);
            const auto& dsp = gp.comp(j).spectral();
            for (std::size_t x = 0; x < npts; ++x) divspec[x] += dsp[x];
        }

        const auto& advspec = adv_f.spectral();
        std::vector<cd> half(npts);
        for (std::size_t x = 0; x < npts; ++x) half[x] = 0.5 * (advspec[x] + divspec[x]);
        comps.push_back(ScalarField::from_spectral(grid, std::move(half)));
    }
    return dealias(VectorField::from_components(std::move(comps)));
}

VectorField pressure_gradient(const VectorField& u, const VectorField& f,
                              const ScalarField& g_at_t, const CbfParams& p) {
    VectorField conv = convection(u);
    VectorField damp = dealias(damping(u, p.r));
    VectorField fg = forcing_term(f, g_at_t.physical());
    // G = conv + beta C(u) - f g; grad p is the pure-gradient part of -G
    VectorField G = add_scaled(conv, 1.0, damp, p.beta);
    G = add_scaled(G, 1.0, fg, -1.0);
    VectorField gp = leray_complement(scaled(G, -1.0));
    gp.set_solenoidal(false);
    return gp;
}

VectorField rhs(const VectorField& u, const VectorField& f, const Modulation& g, double t,
                const CbfParams& p) {
    std::vector<double> gvals;
    g.eval_into(u.grid(), t, gvals);
    VectorField expl = explicit_part(u, f, gvals, p);
    VectorField lin = laplacian(u);
    VectorField out = add_scaled(expl, 1.0, lin, p.mu);
    out = add_scaled(out, 1.0, u, -p.alpha);
    out.set_solenoidal(u.solenoidal());
    return out;
}

VectorField step(const VectorField& u, double t, double dt, const VectorField& f,
                 const Modulation& g, const CbfParams& p) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    const GridPtr grid = u.grid_ptr();
    const int d = u.dim();
    const std::size_t npts = grid->size();
    std::vector<double> gvals;

    g.eval_into(*grid, t, gvals);
    VectorField n1 = explicit_part(u, f, gvals, p);
    std::vector<double> efac = decay_factors(*grid, p, dt);

    // predictor: u* = E (u + dt N1)
    std::vector<ScalarField> pred;
    pred.reserve(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        const auto& us = u.comp(a).spectral();
        const auto& ns = n1.comp(a).spectral();
        std::vector<cd> v(npts);
        for (std::size_t i = 0; i < npts; ++i) v[i] = efac[i] * (us[i] + dt * ns[i]);
        pred.push_back(ScalarField::from_spectral(grid, std::move(v)));
    }
    VectorField upred = VectorField::from_components(std::move(pred), true);

    g.eval_into(*grid, t + dt, gvals);
    VectorField n2 = explicit_part(upred, f, gvals, p);

    // corrector: u_{n+1} = E (u + dt/2 N1) + dt/2 N2
    std::vector<ScalarField> nxt;
    nxt.reserve(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        const auto& us = u.comp(a).spectral();
        const auto& n1s = n1.comp(a).spectral();
        const auto& n2s = n2.comp(a).spectral();
        std::vector<cd> v(npts);
        for (std::size_t i = 0; i < npts; ++i)
            v[i] = efac[i] * (us[i] + 0.5 * dt * n1s[i]) + 0.5 * dt * n2s[i];
        nxt.push_back(ScalarField::from_spectral(grid, std::move(v)));
    }
    VectorField unext =
        leray_project(dealias(VectorField::from_components(std::move(nxt), true)));

    double linf = norm_linf(unext);
    if (!(linf <= kBlowUpLimit)) throw BlowUpError(t + dt, linf, -1);
    return unext;
}

Trajectory solve_forward(const VectorField& u0, const VectorField& f, const Modulation& g,
                         const CbfParams& p, double T, int nt, const RecordPolicy& rec) {
    if (nt < 1) throw std::invalid_argument("solve_forward: nt must be >= 1");
    if (!(T > 0.0)) throw std::invalid_argument("solve_forward: T must be positive");
    p.validate();

    const double dt = T / nt;
    VectorField u = leray_project(dealias(u0));
    VectorField fs = leray_project(dealias(f));

    std::vector<std::size_t> recs = record_indices(nt, rec);
    Trajectory traj;
    traj.times.reserve(recs.size());
    traj.snapshots.reserve(recs.size());

    std::size_t next_rec = 0;
    auto maybe_record = [&](int s, const VectorField& state) {
        if (next_rec < recs.size() && recs[next_rec] == static_cast<std::size_t>(s)) {
            double t = (s == nt) ? T : dt * s;
            traj.times.push_back(t);
            traj.snapshots.push_back(state);
            if (rec.record_grad_p)
                traj.grad_p.push_back(pressure_gradient(state, fs, g.eval(u.grid_ptr(), t), p));
            if (rec.record_u_t) traj.u_t.push_back(rhs(state, fs, g, t, p));
            ++next_rec;
        }
    };

    maybe_record(0, u);
    for (int s = 0; s < nt; ++s) {
        try {
            u = step(u, dt * s, dt, fs, g, p);
        } catch (const BlowUpError& e) {
            throw BlowUpError(e.t, e.linf, s + 1);
        }
        maybe_record(s + 1, u);
    }
    return traj;
}

}  // namespace cbf
