#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbf/forward.hpp"

namespace cbf {

/// The inverse-problem data pack: recover the divergence-free spatial
/// factor f of the forcing F = f(x) g(x,t) from the final-time data
/// u(.,T) = phi and grad p(.,T) = grad_psi.
struct InverseProblem {
    VectorField u0;
    VectorField phi;
    VectorField grad_psi;
    Modulation g;
    CbfParams params;
    double T = 1.0;
    GridPtr grid;

    /// Throws with every violated invariant listed (solenoidality of u0 and
    /// phi, pure-gradient grad_psi, min |g(.,T)| > 0).
    void validate() const;
};

struct FixedPointConfig {
    int max_iters = 200;
    double rel_tol = 1e-8;
    double theta = 1.0;  // relaxation; 1 = pure Picard

    enum class BallMode { AprioriM, User, Unbounded };
    BallMode ball_mode = BallMode::AprioriM;
    double ball_radius_user = 0.0;

    enum class Start { Zero, RandomInBall };
    Start start = Start::Zero;
    std::uint64_t seed = 12345;

    int n = 0;     // forward-solver resolution; 0 = problem grid
    int nt = 512;  // forward-solver step count
    bool project_b_output = false;
};

/// Constants of the a-priori u_t estimates. The K2 block needs r > 3 and the
/// K3 block needs d = r = 3 with beta*mu > 1; accessing an absent block
/// throws.
struct KTable {
    double k11 = 0, k12 = 0, k13 = 0;

    bool has_k2 = false;
    double gamma = 0, eta_star = 0;
    double k21 = 0, k22 = 0, k23 = 0, k24 = 0, k25 = 0;

    bool has_k3 = false;
    double k31 = 0, k32 = 0, k33 = 0, k34 = 0, k35 = 0;

    void require_k2() const;
    void require_k3() const;
};

KTable k_constants(const CbfParams& params, double T);

struct AdmissibilityReport {
    double g_T = 0.0;  // min_x |g(x,T)|
    bool cond_1e = false;

    std::string regime;  // "1g1", "1g2" or "1g3"
    double regime_lhs = 0.0;
    double regime_rhs = 0.0;  // mu
    bool regime_ok = false;

    bool cond_41 = false;  // denominator positivity (bisection success for 1g1)
    bool M_defined = false;
    double M = 0.0;
    std::string M_note;

    bool has_T_bound = false;
    double example_T_bound = 0.0;

    bool admissible() const { return cond_1e && regime_ok; }
};

AdmissibilityReport check_admissibility(const InverseProblem& problem);

/// The ball radius of the fixed-point argument. For r > 3 and d = r = 3 the
/// displayed closed forms are evaluated; for d = 2, r in [1,3] the implicit
/// bound is solved for its smallest fixed point by scan + bisection.
/// nullopt when the defining denominator is nonpositive (condition (41)
/// violated) or no fixed point exists; *reason then says which.
std::optional<double> compute_M(const InverseProblem& problem, const KTable& kt,
                                std::string* reason = nullptr);

/// (A f)(x) = u_t(x,T) of the forward solution driven by f g.
VectorField operator_A(const VectorField& f, const InverseProblem& problem,
                       const FixedPointConfig& numerics);

/// (B f) = [A f + (phi.grad)phi + grad_psi - mu lap phi + alpha phi
///          + beta |phi|^{r-1} phi] / g(.,T), pointwise in physical space.
/// Not re-projected onto solenoidal fields unless the config asks for it.
VectorField operator_B(const VectorField& f, const InverseProblem& problem,
                       const FixedPointConfig& numerics);

/// The data term (phi.grad)phi + grad_psi - mu lap phi + alpha phi
/// + beta |phi|^{r-1} phi, assembled with the same discrete operators the
/// forward solver uses.
VectorField data_term(const InverseProblem& problem);

struct InverseResult {
    VectorField f_hat;
    int iterations = 0;
    bool converged = false;
    bool blew_up = false;
    int blowup_iteration = -1;

    std::vector<double> residual_history;  // ||B f^k - f^k||_H
    std::vector<double> fnorm_history;     // ||f^k||_H
    std::vector<char> scaled;              // 1 where ball scaling triggered
    std::vector<double> forward_seconds;   // wall time per forward solve

    AdmissibilityReport admissibility;
    bool ball_active = false;
    double ball_radius = 0.0;
    bool ever_scaled = false;
};

/// Picard iteration f^{k+1} = (1-theta) f^k + theta B f^k from f^0 = 0
/// (or a seeded random start), with optional radial scaling onto the ball.
InverseResult solve_inverse(const InverseProblem& problem, const FixedPointConfig& config);

struct PressureRecovery {
    VectorField grad_p;
    double mismatch = 0.0;      // ||grad p(.,T) - grad_psi||_H
    double rel_mismatch = 0.0;  // relative to ||grad_psi||_H
};

PressureRecovery recover_pressure(const InverseProblem& problem, const VectorField& f_hat,
                                  const FixedPointConfig& numerics);

}  // namespace cbf
