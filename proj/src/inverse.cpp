#include "cbf/inverse.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>

#include "cbf/detail/pointwise.hpp"
#include "cbf/lemma_constants.hpp"
#include "cbf/spectral.hpp"

namespace cbf {

namespace {

constexpr double kGFloor = 1e-12;

struct WorkProblem {
    GridPtr grid;
    VectorField u0, phi, grad_psi;
    const Modulation* g;
    CbfParams params;
    double T;
};

WorkProblem to_work_grid(const InverseProblem& pr, const FixedPointConfig& cfg) {
    WorkProblem w;
    w.params = pr.params;
    w.T = pr.T;
    w.g = &pr.g;
    if (cfg.n != 0 && cfg.n != pr.grid->n) {
        w.grid = make_grid(pr.grid->d, cfg.n, pr.grid->L);
        w.u0 = resample(pr.u0, w.grid);
        w.phi = resample(pr.phi, w.grid);
        w.grad_psi = resample(pr.grad_psi, w.grid);
    } else {
        w.grid = pr.grid;
        w.u0 = pr.u0;
        w.phi = pr.phi;
        w.grad_psi = pr.grad_psi;
    }
    return w;
}

VectorField assemble_data_term(const VectorField& phi, const VectorField& grad_psi,
                               const CbfParams& p) {
    VectorField conv = convection(phi);
    VectorField damp = dealias(damping(phi, p.r));
    VectorField lap = laplacian(phi);
    VectorField out = add_scaled(conv, 1.0, grad_psi, 1.0);
    out = add_scaled(out, 1.0, lap, -p.mu);
    out = add_scaled(out, 1.0, phi, p.alpha);
    out = add_scaled(out, 1.0, damp, p.beta);
    out.set_solenoidal(false);
    return out;
}

VectorField apply_B(const VectorField& f, const WorkProblem& w, const FixedPointConfig& cfg,
                    const VectorField& dterm) {
    std::vector<double> gT;
    w.g->eval_into(*w.grid, w.T, gT);
    for (double v : gT)
        if (std::abs(v) < kGFloor)
            throw std::invalid_argument("operator_B: |g(.,T)| below 1e-12 on the grid");

    Trajectory traj =
        solve_forward(w.u0, f, *w.g, w.params, w.T, cfg.nt, RecordPolicy::strided(cfg.nt));
    VectorField ut_T = rhs(traj.final_state(), leray_project(dealias(f)), *w.g, w.T, w.params);

    VectorField num = add_scaled(ut_T, 1.0, dterm, 1.0);
    const int d = num.dim();
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        std::vector<double> vals = num.comp(a).physical();
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] /= gT[i];
        comps.push_back(ScalarField::from_physical(w.grid, std::move(vals)));
    }
    VectorField out = VectorField::from_components(std::move(comps));
    if (cfg.project_b_output) out = leray_project(out);
    return out;
}

VectorField random_solenoidal_start(const GridPtr& grid, double norm, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<ScalarField> comps;
    for (int a = 0; a < grid->d; ++a) {
        std::vector<double> vals(grid->size());
        for (double& v : vals) v = dist(rng);
        comps.push_back(ScalarField::from_physical(grid, std::move(vals)));
    }
    VectorField f = leray_project(dealias(VectorField::from_components(std::move(comps))));
    double n0 = norm_l2(f);
    if (n0 > 0.0) f = scaled(f, norm / n0);
    return f;
}

// smallest m in [0, 1e9] with bound(m) <= m, via geometric scan + bisection
std::optional<double> smallest_fixed_point(const std::function<double(double)>& bound) {
    if (bound(0.0) <= 0.0) return 0.0;
    double prev = 0.0;
    double found_lo = -1.0, found_hi = -1.0;
    for (int j = 0; j <= 18 * 8; ++j) {
        double m = 1e-9 * std::pow(10.0, j / 8.0);
        if (m > 1e9) break;
        if (bound(m) <= m) {
            found_lo = prev;
            found_hi = m;
            break;
        }
        prev = m;
    }
    if (found_hi < 0.0) return std::nullopt;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (found_lo + found_hi);
        if (bound(mid) <= mid)
            found_hi = mid;
        else
            found_lo = mid;
    }
    return found_hi;
}

}  // namespace

void InverseProblem::validate() const {
    params.validate();
    std::string errs;
    if (!(T > 0.0)) errs += "T must be positive; ";
    auto check_solenoidal = [&](const VectorField& v, const char* name) {
        double s = spectral_max(v);
        if (divergence_max_spectral(v) > 1e-9 * (1.0 + s))
            errs += std::string(name) + " is not solenoidal; ";
    };
    check_solenoidal(u0, "u0");
    check_solenoidal(phi, "phi");
    double gp_max = spectral_max(grad_psi);
    if (spectral_max(leray_project(grad_psi)) > 1e-9 * (1.0 + gp_max))
        errs += "grad_psi is not a pure gradient; ";
    if (!(g.min_abs_at(*grid, T) > 0.0)) errs += "min |g(.,T)| must be positive; ";
    if (!errs.empty()) throw std::invalid_argument("InverseProblem: " + errs);
}

void KTable::require_k2() const {
    if (!has_k2) throw std::logic_error("k_constants: K_2* require r > 3");
}

void KTable::require_k3() const {
    if (!has_k3)
        throw std::logic_error("k_constants: K_3* require d = r = 3 and beta*mu > 1");
}

KTable k_constants(const CbfParams& p, double /*T*/) {
    p.validate();
    KTable kt;
    kt.k11 = consts::K11(p.r);
    kt.k12 = consts::K12(p.r, p.alpha);
    kt.k13 = consts::K13(p.r, p.alpha);
    if (p.r > 3.0) {
        kt.has_k2 = true;
        kt.gamma = consts::gamma_const(p.r, p.beta);
        kt.eta_star = consts::eta_star(p.r, p.beta, p.mu);
        kt.k21 = consts::K21(p.r, p.mu);
        kt.k22 = consts::K22(p.r, p.alpha, p.beta, p.mu);
        kt.k23 = consts::K23(p.r, p.alpha, p.beta, p.mu);
        kt.k24 = consts::K24(p.r, p.alpha, p.beta, p.mu);
        kt.k25 = consts::K25(p.r, p.alpha, p.mu);
    }
    if (p.d == 3 && p.r == 3.0 && p.beta * p.mu > 1.0) {
        kt.has_k3 = true;
        kt.k31 = consts::K31(p.beta, p.mu);
        kt.k32 = consts::K32(p.alpha);
        kt.k33 = consts::K33(p.alpha, p.beta, p.mu);
        kt.k34 = consts::K34(p.alpha, p.beta, p.mu);
        kt.k35 = consts::K35(p.alpha, p.beta, p.mu);
    }
    return kt;
}

VectorField data_term(const InverseProblem& pr) {
    return assemble_data_term(pr.phi, pr.grad_psi, pr.params);
}

std::optional<double> compute_M(const InverseProblem& pr, const KTable& kt,
                                std::string* reason) {
    const CbfParams& p = pr.params;
    const double T = pr.T;
    const double gT = pr.g.min_abs_at(*pr.grid, T);
    const double G = pr.g.sup_abs(*pr.grid, T);
    const double Gt = pr.g.sup_abs_dt(*pr.grid, T);
    const double u0h = norm_l2(pr.u0);
    const double phi_term = norm_l2(data_term(pr));
    auto fail = [&](const std::string& why) -> std::optional<double> {
        if (reason) *reason = why;
        return std::nullopt;
    };
    if (!(gT > 0.0)) return fail("g_T is not positive");

    if (p.r > 3.0) {
        kt.require_k2();
        if (!(kt.eta_star < p.alpha)) return fail("alpha <= eta*");
        double sub = std::sqrt(8.0 * kt.k24 + 8.0 * kt.k25 / T) * G +
                     std::sqrt(3.0 / p.alpha + 1.0 / (p.alpha * (p.alpha - kt.eta_star))) * Gt;
        double denom = gT - sub;
        if (!(denom > 0.0)) return fail("condition (41) violated");
        double num =
            std::sqrt(8.0 * kt.k21 / (T * T) + 8.0 * kt.k22 + 8.0 * kt.k23 / T) * u0h + phi_term;
        return num / denom;
    }
    if (p.d == 3 && p.r == 3.0) {
        if (!kt.has_k3) return fail("beta*mu <= 1: K_3* constants undefined");
        double sub = std::sqrt(8.0 * kt.k34 + 8.0 * kt.k35 / T) * G +
                     std::sqrt(3.0 / p.alpha + 1.0 / (p.alpha * p.alpha)) * Gt;
        double denom = gT - sub;
        if (!(denom > 0.0)) return fail("condition (41) violated");
        double num =
            std::sqrt(8.0 * kt.k31 / (T * T) + 8.0 * kt.k32 + 8.0 * kt.k33 / T) * u0h + phi_term;
        return num / denom;
    }

    // d = 2, r in [1,3]: smallest fixed point of the implicit bound
    const double S = u0h * u0h;
    const double a = p.alpha, mu = p.mu;
    auto bound = [&](double m) {
        double m2 = m * m;
        double g2m2 = G * G * m2;
        double b0 = (1.0 / T + a / 8.0) * S + g2m2 / a;
        double A = (kt.k11 / T + kt.k12) * S + (0.75 * T + kt.k13) * g2m2 +
                   std::pow(u0h + G * m / a, 2.0 / 3.0) *
                       std::pow(4.0 / mu * b0 + g2m2 / (2.0 * mu * a), 4.0 / 3.0) *
                       (4.0 / (mu * mu) * b0 + 3.0 * T / (8.0 * mu * mu) * g2m2);
        double E = 8.0 / T + 8.0 / (mu * mu) * b0 + g2m2 / (mu * mu * a);
        return (std::sqrt(A) * std::sqrt(E) + std::sqrt(T / a) * Gt * m + phi_term) / gT;
    };
    auto m = smallest_fixed_point(bound);
    if (!m) return fail("no fixed point of the implicit bound");
    return m;
}

AdmissibilityReport check_admissibility(const InverseProblem& pr) {
    const CbfParams& p = pr.params;
    AdmissibilityReport rep;
    rep.g_T = pr.g.min_abs_at(*pr.grid, pr.T);
    rep.cond_1e = rep.g_T > 0.0;
    rep.regime_rhs = p.mu;

    if (p.r > 3.0) {
        rep.regime = "1g2";
        rep.regime_lhs = 2.0 * (p.r - 3.0) / (p.alpha * (p.r - 1.0)) *
                         std::pow(8.0 / (p.beta * p.mu * (p.r - 1.0)), 2.0 / (p.r - 3.0));
        rep.regime_ok = rep.regime_lhs < p.mu;
    } else if (p.d == 2) {
        rep.regime = "1g1";
        rep.regime_lhs =
            3.0 / (4.0 * std::cbrt(p.alpha)) * std::pow(norm_lp(pr.phi, 4.0), 4.0 / 3.0);
        rep.regime_ok = rep.regime_lhs <= p.mu;
    } else {
        rep.regime = "1g3";
        rep.regime_lhs = 1.0 / p.beta;
        rep.regime_ok = rep.regime_lhs < p.mu;
    }

    KTable kt = k_constants(p, pr.T);
    std::string why;
    auto M = compute_M(pr, kt, &why);
    rep.M_defined = M.has_value();
    rep.M = M.value_or(0.0);
    rep.M_note = M ? "" : why;
    rep.cond_41 = rep.M_defined;

    // Example 4.5 lower bound on T: g constant in space and time, u0 = 0.
    const double Gt = pr.g.sup_abs_dt(*pr.grid, pr.T);
    const double G = pr.g.sup_abs(*pr.grid, pr.T);
    bool g_const = pr.g.spatially_constant() && Gt == 0.0 && std::abs(G - rep.g_T) < 1e-14;
    bool u0_zero = norm_l2(pr.u0) == 0.0;
    if (g_const && u0_zero) {
        double k_a = 0.0, k_b = 0.0;
        if (p.r > 3.0 && kt.has_k2) {
            k_a = kt.k24;
            k_b = kt.k25;
        } else if (kt.has_k3) {
            k_a = kt.k34;
            k_b = kt.k35;
        }
        if (k_a > 0.0 && 8.0 * k_a < 1.0) {
            rep.has_T_bound = true;
            // evaluated at the concrete admissible radius M = 2 Phi / sqrt(1 - 8 K_a),
            // for which the bound collapses to a data-independent value
            rep.example_T_bound = 32.0 * k_b / (3.0 * (1.0 - 8.0 * k_a));
        }
    }
    return rep;
}

VectorField operator_A(const VectorField& f, const InverseProblem& pr,
                       const FixedPointConfig& cfg) {
    WorkProblem w = to_work_grid(pr, cfg);
    VectorField fw = f.grid_ptr()->n == w.grid->n ? f : resample(f, w.grid);
    fw = leray_project(dealias(fw));
    Trajectory traj =
        solve_forward(w.u0, fw, *w.g, w.params, w.T, cfg.nt, RecordPolicy::strided(cfg.nt));
    VectorField ut = rhs(traj.final_state(), fw, *w.g, w.T, w.params);
    if (w.grid->n != pr.grid->n) ut = resample(ut, pr.grid);
    return ut;
}

VectorField operator_B(const VectorField& f, const InverseProblem& pr,
                       const FixedPointConfig& cfg) {
    WorkProblem w = to_work_grid(pr, cfg);
    VectorField dterm = assemble_data_term(w.phi, w.grad_psi, w.params);
    VectorField fw = f.grid_ptr()->n == w.grid->n ? f : resample(f, w.grid);
    VectorField out = apply_B(fw, w, cfg, dterm);
    if (w.grid->n != pr.grid->n) out = resample(out, pr.grid);
    return out;
}

InverseResult solve_inverse(const InverseProblem& pr, const FixedPointConfig& cfg) {
    if (cfg.max_iters < 1) throw std::invalid_argument("solve_inverse: max_iters must be >= 1");
    if (!(cfg.theta > 0.0 && cfg.theta <= 1.0))
        throw std::invalid_argument("solve_inverse: theta must lie in (0,1]");
    if (!(cfg.rel_tol > 0.0)) throw std::invalid_argument("solve_inverse: rel_tol must be positive");
    pr.validate();

    InverseResult res;
    res.admissibility = check_admissibility(pr);

    WorkProblem w = to_work_grid(pr, cfg);
    VectorField dterm = assemble_data_term(w.phi, w.grad_psi, w.params);

    res.ball_active = false;
    if (cfg.ball_mode == FixedPointConfig::BallMode::AprioriM) {
        if (res.admissibility.M_defined) {
            res.ball_active = true;
            res.ball_radius = res.admissibility.M;
        }
        // with M undefined the iteration falls back to unbounded mode
    } else if (cfg.ball_mode == FixedPointConfig::BallMode::User) {
        res.ball_active = true;
        res.ball_radius = cfg.ball_radius_user;
    }

    VectorField f = VectorField::zero(w.grid);
    if (cfg.start == FixedPointConfig::Start::RandomInBall) {
        double target = res.ball_active ? 0.5 * res.ball_radius
                                        : 0.5 * std::max(1.0, norm_l2(w.phi));
        f = random_solenoidal_start(w.grid, target, cfg.seed);
    }

    const double eps_floor = 1e-30;
    bool converged = false;
    int iters = 0;
    VectorField best_f = f;
    double best_residual = std::numeric_limits<double>::infinity();
    for (int k = 0; k < cfg.max_iters; ++k) {
        auto tic = std::chrono::steady_clock::now();
        VectorField bf;
        try {
            bf = apply_B(f, w, cfg, dterm);
        } catch (const BlowUpError&) {
            res.blew_up = true;
            res.blowup_iteration = k;
            break;
        }
        auto toc = std::chrono::steady_clock::now();
        res.forward_seconds.push_back(std::chrono::duration<double>(toc - tic).count());

        double fnorm = norm_l2(f);
        VectorField diff = add_scaled(bf, 1.0, f, -1.0);
        double residual = norm_l2(diff);
        res.residual_history.push_back(residual);
        res.fnorm_history.push_back(fnorm);
        if (residual < best_residual) {
            best_residual = residual;
            best_f = f;
        }

        VectorField fnext = add_scaled(f, 1.0 - cfg.theta, bf, cfg.theta);
        bool scaled_now = false;
        if (res.ball_active) {
            double nn = norm_l2(fnext);
            if (nn > res.ball_radius && nn > 0.0) {
                fnext = scaled(fnext, res.ball_radius / nn);
                scaled_now = true;
                res.ever_scaled = true;
            }
        }
        res.scaled.push_back(scaled_now ? 1 : 0);

        double stepnorm = norm_l2(add_scaled(fnext, 1.0, f, -1.0));
        f = fnext;
        iters = k + 1;
        if (stepnorm / std::max(fnorm, eps_floor) < cfg.rel_tol) {
            converged = true;
            break;
        }
    }

    res.iterations = iters;
    res.converged = converged;
    // when the iteration never settled, hand back the best iterate seen
    const VectorField& out = converged ? f : best_f;
    res.f_hat = (w.grid->n != pr.grid->n) ? resample(out, pr.grid) : out;
    return res;
}

PressureRecovery recover_pressure(const InverseProblem& pr, const VectorField& f_hat,
                                  const FixedPointConfig& cfg) {
    WorkProblem w = to_work_grid(pr, cfg);
    VectorField fw = f_hat.grid_ptr()->n == w.grid->n ? f_hat : resample(f_hat, w.grid);
    fw = leray_project(dealias(fw));
    Trajectory traj =
        solve_forward(w.u0, fw, *w.g, w.params, w.T, cfg.nt, RecordPolicy::strided(cfg.nt));
    VectorField gp = pressure_gradient(traj.final_state(), fw, w.g->eval(w.grid, w.T), w.params);
    if (w.grid->n != pr.grid->n) gp = resample(gp, pr.grid);

    PressureRecovery out;
    out.grad_p = gp;
    VectorField diff = add_scaled(gp, 1.0, pr.grad_psi, -1.0);
    out.mismatch = norm_l2(diff);
    double ref = norm_l2(pr.grad_psi);
    out.rel_mismatch = out.mismatch / std::max(ref, 1e-300);
    return out;
}

}  // namespace cbf
