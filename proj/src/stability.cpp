#include "cbf/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "cbf/spectral.hpp"

namespace cbf {

namespace {

VectorField random_unit_solenoidal(const GridPtr& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<ScalarField> comps;
    for (int a = 0; a < grid->d; ++a) {
        std::vector<double> vals(grid->size());
        for (double& v : vals) v = dist(rng);
        comps.push_back(ScalarField::from_physical(grid, std::move(vals)));
    }
    VectorField f = VectorField::from_components(std::move(comps));
    // keep the direction smooth: damp high modes before projecting
    f = dealias(f);
    const TorusGrid& g = *grid;
    for (int a = 0; a < g.d; ++a) {
        auto& sp = f.comp(a).mutable_spectral();
        std::size_t idx = 0;
        const int n = g.n;
        auto smooth = [&](int m) {
            int k = std::abs(g.freq[m]);
            return (k <= 3) ? 1.0 : 0.0;
        };
        if (g.d == 2) {
            for (int i0 = 0; i0 < n; ++i0)
                for (int i1 = 0; i1 < n; ++i1, ++idx) sp[idx] *= smooth(i0) * smooth(i1);
        } else {
            for (int i0 = 0; i0 < n; ++i0)
                for (int i1 = 0; i1 < n; ++i1)
                    for (int i2 = 0; i2 < n; ++i2, ++idx)
                        sp[idx] *= smooth(i0) * smooth(i1) * smooth(i2);
        }
    }
    f = leray_project(f);
    double nrm = norm_l2(f);
    if (nrm == 0.0) throw std::runtime_error("stability: degenerate perturbation shape");
    return scaled(f, 1.0 / nrm);
}

VectorField random_unit_gradient(const GridPtr& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> vals(grid->size());
    for (double& v : vals) v = dist(rng);
    ScalarField q = dealias(ScalarField::from_physical(grid, std::move(vals)));
    // low-mode part only
    auto& sp = q.mutable_spectral();
    const TorusGrid& g = *grid;
    const int n = g.n;
    std::size_t idx = 0;
    auto smooth = [&](int m) { return (std::abs(g.freq[m]) <= 3) ? 1.0 : 0.0; };
    if (g.d == 2) {
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1, ++idx) sp[idx] *= smooth(i0) * smooth(i1);
    } else {
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1)
                for (int i2 = 0; i2 < n; ++i2, ++idx)
                    sp[idx] *= smooth(i0) * smooth(i1) * smooth(i2);
    }
    VectorField gr = gradient(q);
    double nrm = norm_l2(gr);
    if (nrm == 0.0) throw std::runtime_error("stability: degenerate gradient shape");
    return scaled(gr, 1.0 / nrm);
}

struct Shapes {
    VectorField solenoidal;  // for u0 / phi
    VectorField grad;        // for grad_psi
};

InverseProblem perturb(const InverseProblem& base, const PerturbationSpec& spec,
                       const Shapes& shapes, double delta) {
    InverseProblem p = base;
    switch (spec.target) {
        case PerturbationSpec::Target::U0:
            p.u0 = add_scaled(base.u0, 1.0, shapes.solenoidal, delta);
            break;
        case PerturbationSpec::Target::Phi:
            p.phi = add_scaled(base.phi, 1.0, shapes.solenoidal, delta);
            break;
        case PerturbationSpec::Target::GradPsi:
            p.grad_psi = add_scaled(base.grad_psi, 1.0, shapes.grad, delta);
            break;
        case PerturbationSpec::Target::G:
            p.g = base.g.shifted(delta, 0.0, base.T);
            break;
        case PerturbationSpec::Target::Gt:
            // slope vanishing at T keeps g(.,T) and hence g_T unchanged
            p.g = base.g.shifted(0.0, delta, base.T);
            break;
    }
    return p;
}

// H^{-1}-weighted norm of a (pure-gradient) field: (sum |w_k|^2 / |k|^2)^{1/2}
double hminus1_norm(const VectorField& w) {
    const TorusGrid& g = w.grid();
    const int n = g.n;
    double vol = 1.0;
    for (int a = 0; a < g.d; ++a) vol *= g.L;
    double acc = 0.0;
    for (int a = 0; a < g.d; ++a) {
        const auto& sp = w.comp(a).spectral();
        std::size_t idx = 0;
        auto wav = [&](int m) { return (m == n / 2) ? 0.0 : g.wavenumbers[m]; };
        if (g.d == 2) {
            for (int i0 = 0; i0 < n; ++i0) {
                double k0 = wav(i0);
                for (int i1 = 0; i1 < n; ++i1, ++idx) {
                    double k2 = k0 * k0 + wav(i1) * wav(i1);
                    if (k2 > 0.0) acc += std::norm(sp[idx]) / k2;
                }
            }
        } else {
            for (int i0 = 0; i0 < n; ++i0) {
                double k0 = wav(i0);
                for (int i1 = 0; i1 < n; ++i1) {
                    double k1 = wav(i1);
                    for (int i2 = 0; i2 < n; ++i2, ++idx) {
                        double k2 = k0 * k0 + k1 * k1 + wav(i2) * wav(i2);
                        if (k2 > 0.0) acc += std::norm(sp[idx]) / k2;
                    }
                }
            }
        }
    }
    return std::sqrt(acc * vol);
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& v) {
    double acc = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i)
        acc += 0.5 * (v[i] + v[i - 1]) * (t[i] - t[i - 1]);
    return acc;
}

}  // namespace

double column_value(const StabilityRow& row, ErrorColumn column) {
    switch (column) {
        case ErrorColumn::F: return row.f_err;
        case ErrorColumn::USup: return row.u_sup_err;
        case ErrorColumn::UGradInt: return row.u_grad_int;
        case ErrorColumn::ULrp1Int: return row.u_lrp1_int;
        case ErrorColumn::PProxy: return row.p_proxy;
    }
    return 0.0;
}

std::string column_name(ErrorColumn column) {
    switch (column) {
        case ErrorColumn::F: return "f_err";
        case ErrorColumn::USup: return "u_sup_err";
        case ErrorColumn::UGradInt: return "u_grad_int";
        case ErrorColumn::ULrp1Int: return "u_lrp1_int";
        case ErrorColumn::PProxy: return "p_proxy";
    }
    return "?";
}

bool row_usable_for_fit(const StabilityTable& table, const StabilityRow& row,
                        ErrorColumn column) {
    if (!row.valid) return false;
    double base = 0.0;
    switch (column) {
        case ErrorColumn::F: base = table.base_f_norm; break;
        case ErrorColumn::USup: base = table.base_u_sup; break;
        case ErrorColumn::UGradInt: base = table.base_grad_int; break;
        case ErrorColumn::ULrp1Int: base = table.base_lrp1_int; break;
        case ErrorColumn::PProxy: base = table.base_p_proxy; break;
    }
    return column_value(row, column) >= 10.0 * table.rel_tol * base;
}

StabilityTable run_stability_sweep(const InverseProblem& base, const PerturbationSpec& spec,
                                   const FixedPointConfig& config, int threads) {
    if (spec.rungs < 1) throw std::invalid_argument("stability: need at least one rung");
    if (!(spec.ratio > 0.0 && spec.ratio < 1.0))
        throw std::invalid_argument("stability: ladder ratio must lie in (0,1)");

    InverseResult base_res = solve_inverse(base, config);
    if (!base_res.converged)
        throw std::runtime_error("stability: base inverse solve did not converge");
    const VectorField& f_base = base_res.f_hat;

    RecordPolicy rec = RecordPolicy::landmarks(/*grad_p=*/true, /*u_t=*/false);
    Trajectory base_traj = solve_forward(base.u0, f_base, base.g, base.params, base.T, config.nt, rec);

    Shapes shapes{random_unit_solenoidal(base.grid, spec.seed),
                  random_unit_gradient(base.grid, spec.seed + 1)};

    StabilityTable table;
    table.r = base.params.r;
    table.rel_tol = config.rel_tol;
    table.base_f_norm = norm_l2(f_base);
    {
        const std::size_t m = base_traj.times.size();
        std::vector<double> grad2(m), lrp1(m), pq(m);
        double sup_h = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const VectorField& u = base_traj.snapshots[i];
            sup_h = std::max(sup_h, norm_l2(u));
            double gs = norm_h1_semi(u);
            grad2[i] = gs * gs;
            lrp1[i] = std::pow(norm_lp(u, base.params.r + 1.0), base.params.r + 1.0);
            pq[i] = hminus1_norm(base_traj.grad_p[i]);
        }
        table.base_u_sup = sup_h;
        table.base_grad_int = trapezoid(base_traj.times, grad2);
        table.base_lrp1_int = trapezoid(base_traj.times, lrp1);
        const double q = (base.params.r + 1.0) / base.params.r;
        std::vector<double> pq_pow(m);
        for (std::size_t i = 0; i < m; ++i) pq_pow[i] = std::pow(pq[i], q);
        table.base_p_proxy = std::pow(trapezoid(base_traj.times, pq_pow), 1.0 / q);
    }
    table.rows.resize(static_cast<std::size_t>(spec.rungs));

    auto run_row = [&](int j) {
        StabilityRow row;
        row.delta = spec.delta0 * std::pow(spec.ratio, j);
        const double delta = row.delta;
        try {
            InverseProblem pp = perturb(base, spec, shapes, delta);
            pp.validate();
            InverseResult res = solve_inverse(pp, config);
            if (!res.converged) {
                row.invalid_reason = "inverse solve did not converge";
                table.rows[static_cast<std::size_t>(j)] = row;
                return;
            }
            row.f_err = norm_l2(add_scaled(res.f_hat, 1.0, f_base, -1.0));

            Trajectory tp =
                solve_forward(pp.u0, res.f_hat, pp.g, pp.params, pp.T, config.nt, rec);
            const std::size_t m = base_traj.times.size();
            std::vector<double> grad2(m), lrp1(m), pq(m);
            double sup_h = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                VectorField du = add_scaled(tp.snapshots[i], 1.0, base_traj.snapshots[i], -1.0);
                sup_h = std::max(sup_h, norm_l2(du));
                double gs = norm_h1_semi(du);
                grad2[i] = gs * gs;
                lrp1[i] = std::pow(norm_lp(du, base.params.r + 1.0), base.params.r + 1.0);
                VectorField dp = add_scaled(tp.grad_p[i], 1.0, base_traj.grad_p[i], -1.0);
                pq[i] = hminus1_norm(dp);
            }
            row.u_sup_err = sup_h;
            row.u_grad_int = trapezoid(base_traj.times, grad2);
            row.u_lrp1_int = trapezoid(base_traj.times, lrp1);
            const double q = (base.params.r + 1.0) / base.params.r;
            std::vector<double> pq_pow(m);
            for (std::size_t i = 0; i < m; ++i) pq_pow[i] = std::pow(pq[i], q);
            row.p_proxy = std::pow(trapezoid(base_traj.times, pq_pow), 1.0 / q);

            // data differences
            row.d_u0 = norm_l2(add_scaled(pp.u0, 1.0, base.u0, -1.0));
            VectorField dphi = add_scaled(pp.phi, 1.0, base.phi, -1.0);
            row.d_grad_phi = norm_h1_semi(dphi);
            VectorField dpsi = add_scaled(pp.grad_psi, 1.0, base.grad_psi, -1.0);
            VectorField psi_lap = add_scaled(dpsi, 1.0, laplacian(dphi), -base.params.mu);
            row.d_psi_lap = norm_l2(psi_lap);
            if (spec.target == PerturbationSpec::Target::G) {
                row.d_g = delta;
                row.d_gt = 0.0;
            } else if (spec.target == PerturbationSpec::Target::Gt) {
                row.d_g = delta * base.T;
                row.d_gt = delta;
            }

            const double e = 2.0 / (base.params.r + 1.0);
            row.data_pow_sum = std::pow(row.d_u0, e) + std::pow(row.d_g, e) +
                               std::pow(row.d_gt, e) + std::pow(row.d_grad_phi, e) +
                               std::pow(row.d_psi_lap, e);
            row.data_sum = row.d_u0 + row.d_g + row.d_gt + row.d_grad_phi + row.d_psi_lap;
            row.valid = true;
        } catch (const std::exception& e) {
            row.valid = false;
            row.invalid_reason = e.what();
        }
        table.rows[static_cast<std::size_t>(j)] = row;
    };

    if (threads <= 1) {
        for (int j = 0; j < spec.rungs; ++j) run_row(j);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        int nw = std::min(threads, spec.rungs);
        for (int w = 0; w < nw; ++w)
            pool.emplace_back([&]() {
                for (int j = next.fetch_add(1); j < spec.rungs; j = next.fetch_add(1)) run_row(j);
            });
        for (auto& th : pool) th.join();
    }
    return table;
}

ExponentFit fit_holder_exponent(const StabilityTable& table, ErrorColumn column) {
    ExponentFit fit;
    std::vector<double> xs, ys;
    for (const auto& row : table.rows) {
        if (!row_usable_for_fit(table, row, column)) continue;
        double v = column_value(row, column);
        if (!(v > 0.0)) {
            fit.reason = "nonpositive error in column " + column_name(column);
            return fit;
        }
        xs.push_back(std::log(row.delta));
        ys.push_back(std::log(v));
    }
    if (xs.size() < 4) {
        fit.reason = "fewer than 4 usable rows";
        return fit;
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) {
        fit.reason = "degenerate abscissae";
        return fit;
    }
    double slope = (n * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / n;
    double ss_res = 0.0, ss_tot = 0.0;
    double ymean = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double pred = slope * xs[i] + intercept;
        ss_res += (ys[i] - pred) * (ys[i] - pred);
        ss_tot += (ys[i] - ymean) * (ys[i] - ymean);
    }
    fit.ok = true;
    fit.exponent = slope;
    fit.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

FStabilityVerdict check_f_stability_bound(const StabilityTable& table) {
    FStabilityVerdict v;
    for (const auto& row : table.rows) {
        if (!row_usable_for_fit(table, row, ErrorColumn::F)) continue;
        if (!(row.data_sum > 0.0)) continue;
        v.ratios.push_back(row.f_err / row.data_sum);
    }
    if (v.ratios.empty()) {
        v.pass = false;
        return v;
    }
    v.max_ratio = *std::max_element(v.ratios.begin(), v.ratios.end());
    v.min_ratio = *std::min_element(v.ratios.begin(), v.ratios.end());
    v.pass = std::isfinite(v.max_ratio) &&
             (v.min_ratio <= 0.0 ? false : v.max_ratio / v.min_ratio <= 10.0);
    return v;
}

}  // namespace cbf
