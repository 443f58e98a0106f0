#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cbf/catalog.hpp"
#include "cbf/inverse.hpp"
#include "cbf/manufacture.hpp"
#include "cbf/spectral.hpp"
#include "test_helpers.hpp"

using namespace cbf;
using cbf::testing::taylor_green;

namespace {

CbfParams make_params(int d, double mu, double alpha, double beta, double r, double L) {
    CbfParams p;
    p.d = d;
    p.mu = mu;
    p.alpha = alpha;
    p.beta = beta;
    p.r = r;
    p.L = L;
    return p;
}

InverseProblem zero_problem(const GridPtr& grid, const CbfParams& p, double T) {
    InverseProblem pr;
    pr.grid = grid;
    pr.params = p;
    pr.T = T;
    pr.g = Modulation::constant(1.0);
    pr.u0 = VectorField::zero(grid);
    pr.phi = VectorField::zero(grid);
    pr.grad_psi = VectorField::zero(grid);
    return pr;
}

Manufactured standard_problem(int n, int nt) {
    auto grid = make_grid(2, n, 2.0 * M_PI);
    CbfParams p = make_params(2, 1.0, 4.0, 1.0, 3.0, grid->L);
    VectorField u0 = scaled(catalog::named_field("tg1", grid), 0.3);
    VectorField f = catalog::named_field("band1", grid);
    return manufacture(grid, p, 1.0, nt, u0, f, Modulation::constant(1.0));
}

}  // namespace

TEST_CASE("k_constants: closed-form values and regime gating") {
    auto p = make_params(2, 1.0, 2.0, 1.0, 3.0, 1.0);
    KTable kt = k_constants(p, 1.0);
    CHECK(kt.k11 == doctest::Approx(6.0).epsilon(1e-15));  // 4 + 8/4
    CHECK(kt.k12 == doctest::Approx(2.5 * 2.0 + 2.0 / 4.0).epsilon(1e-15));
    CHECK(kt.k13 == doctest::Approx(8.0 / 2.0).epsilon(1e-15));  // 6/a + 2/a
    CHECK_FALSE(kt.has_k2);
    CHECK_THROWS(kt.require_k2());
    CHECK_FALSE(kt.has_k3);

    auto p3 = make_params(3, 1.0, 1.0, 2.0, 3.0, 1.0);
    KTable k3 = k_constants(p3, 1.0);
    REQUIRE(k3.has_k3);
    CHECK(k3.k31 == doctest::Approx(8.0).epsilon(1e-15));  // 6 + 2/(2-1)

    // beta*mu <= 1 rejects the K3 block
    auto p3bad = make_params(3, 0.4, 1.0, 2.0, 3.0, 1.0);
    CHECK_THROWS(k_constants(p3bad, 1.0).require_k3());

    // gamma at r = 5, beta = mu = 1 equals 0.25; cross-check against an
    // independent exp/log evaluation
    auto p5 = make_params(2, 1.0, 1.0, 1.0, 5.0, 1.0);
    KTable k5 = k_constants(p5, 1.0);
    REQUIRE(k5.has_k2);
    CHECK(k5.gamma == doctest::Approx(0.25).epsilon(1e-15));
    double r = 5.0, beta = 1.0;
    double gamma2 = (r - 3.0) / (r - 1.0) *
                    std::exp(2.0 / (r - 3.0) * std::log(2.0 / (beta * (r - 1.0))));
    CHECK(k5.gamma == doctest::Approx(gamma2).epsilon(1e-14));
    double eta2 = (r - 3.0) / (1.0 * (r - 1.0)) *
                  std::exp(2.0 / (r - 3.0) * std::log(2.0 / (1.0 * (r - 1.0))));
    CHECK(k5.eta_star == doctest::Approx(eta2).epsilon(1e-14));
}

TEST_CASE("admissibility: the three regime conditions") {
    auto g3 = make_grid(3, 8, 1.0);

    // d = r = 3: 1/beta < mu
    auto pr = zero_problem(g3, make_params(3, 1.0, 1.0, 2.0, 3.0, 1.0), 1.0);
    AdmissibilityReport rep = check_admissibility(pr);
    CHECK(rep.regime == "1g3");
    CHECK(rep.regime_ok);
    CHECK(rep.cond_1e);

    pr.params.mu = 0.4;
    rep = check_admissibility(pr);
    CHECK_FALSE(rep.regime_ok);  // 0.5 >= 0.4

    // d = 2, r = 1, phi = 0: left side zero, holds for every mu
    auto g2 = make_grid(2, 8, 1.0);
    auto pr2 = zero_problem(g2, make_params(2, 1e-6, 1.0, 1.0, 1.0, 1.0), 1.0);
    rep = check_admissibility(pr2);
    CHECK(rep.regime == "1g1");
    CHECK(rep.regime_ok);

    // r > 3 condition
    auto pr5 = zero_problem(g2, make_params(2, 10.0, 40.0, 1.0, 5.0, 1.0), 1.0);
    rep = check_admissibility(pr5);
    CHECK(rep.regime == "1g2");
    CHECK(rep.regime_ok);
}

TEST_CASE("compute_M: zero data, condition (41) violation, plug-in value") {
    auto g3 = make_grid(3, 8, 1.0);

    // alpha = 24, beta = 8, mu = 1, T = 50, g = 1: denominator positive
    auto pr = zero_problem(g3, make_params(3, 1.0, 24.0, 8.0, 3.0, 1.0), 50.0);
    KTable kt = k_constants(pr.params, pr.T);
    REQUIRE(kt.has_k3);
    std::string why;
    auto M = compute_M(pr, kt, &why);
    REQUIRE(M.has_value());
    CHECK(*M == doctest::Approx(0.0));

    // the same constants by hand: K34 = 3/96 + 3/56, K35 = (8 + 1/7) / 12
    double k34 = 3.0 / 96.0 + 3.0 / 56.0;
    double k35 = (8.0 + 1.0 / 7.0) * 2.0 / 24.0;
    CHECK(kt.k34 == doctest::Approx(k34).epsilon(1e-15));
    CHECK(kt.k35 == doctest::Approx(k35).epsilon(1e-15));
    double denom = 1.0 - std::sqrt(8.0 * k34 + 8.0 * k35 / 50.0);
    REQUIRE(denom > 0.0);

    // nonzero u0 exercises the numerator; compare against the hand formula
    pr.u0 = catalog::named_field("abc1", g3);
    double u0h = norm_l2(pr.u0);
    auto M2 = compute_M(pr, kt, &why);
    REQUIRE(M2.has_value());
    double k31 = 6.0 + 2.0 / 7.0, k32 = 18.0, k33 = (15.0 + 1.0 / 7.0) * 24.0 / 4.0;
    double num = std::sqrt(8.0 * k31 / 2500.0 + 8.0 * k32 + 8.0 * k33 / 50.0) * u0h;
    CHECK(*M2 == doctest::Approx(num / denom).epsilon(1e-12));

    // alpha = 8, beta = 2, mu = 1, T = 10: 8 K34 = 3.75 alone breaks (41)
    auto bad = zero_problem(g3, make_params(3, 1.0, 8.0, 2.0, 3.0, 1.0), 10.0);
    KTable ktb = k_constants(bad.params, bad.T);
    auto Mb = compute_M(bad, ktb, &why);
    CHECK_FALSE(Mb.has_value());
    CHECK(why == "condition (41) violated");

    // Example 4.5 T bound is reported for constant g and zero u0
    auto zero_pr = zero_problem(g3, make_params(3, 1.0, 24.0, 8.0, 3.0, 1.0), 50.0);
    auto repo = check_admissibility(zero_pr);
    CHECK(repo.has_T_bound);
    CHECK(repo.example_T_bound ==
          doctest::Approx(32.0 * k35 / (3.0 * (1.0 - 8.0 * k34))).epsilon(1e-12));
    // a nonzero u0 leaves the example's premises, so no bound is reported
    CHECK_FALSE(check_admissibility(pr).has_T_bound);
}

TEST_CASE("compute_M for d = 2, r in [1,3]: implicit bound has no fixed point") {
    // the m^2 coefficients multiply to at least (3T/4)(8/T) = 6 > g_T^2/||g||_0^2,
    // so the scan must come back empty
    auto g2 = make_grid(2, 8, 1.0);
    auto pr = zero_problem(g2, make_params(2, 1.0, 4.0, 1.0, 3.0, 1.0), 1.0);
    pr.u0 = scaled(catalog::named_field("tg1", g2), 0.1);
    KTable kt = k_constants(pr.params, pr.T);
    std::string why;
    auto M = compute_M(pr, kt, &why);
    CHECK_FALSE(M.has_value());
    CHECK(why == "no fixed point of the implicit bound");
    // with zero data the trivial fixed point m = 0 exists
    auto zr = zero_problem(g2, pr.params, 1.0);
    auto Mz = compute_M(zr, k_constants(zr.params, 1.0), &why);
    REQUIRE(Mz.has_value());
    CHECK(*Mz == doctest::Approx(0.0));
}

TEST_CASE("operator_A: zero data, analytic vortex value, continuity in f") {
    auto grid = make_grid(2, 16, 2.0 * M_PI);
    CbfParams p = make_params(2, 0.5, 0.5, 0.5, 1.0, grid->L);
    const double T = 0.25;
    auto pr = zero_problem(grid, p, T);
    FixedPointConfig fp;
    fp.nt = 250;

    CHECK(norm_l2(operator_A(VectorField::zero(grid), pr, fp)) == 0.0);

    // f = 0, u0 = vortex: A f = -lam e^{-lam T} u0
    pr.u0 = leray_project(dealias(taylor_green(grid)));
    const double lam = 2.0 * p.mu + p.alpha + p.beta;
    VectorField af = operator_A(VectorField::zero(grid), pr, fp);
    VectorField expect = scaled(pr.u0, -lam * std::exp(-lam * T));
    CHECK(norm_l2(add_scaled(af, 1.0, expect, -1.0)) <= 1e-6 * norm_l2(expect));

    // continuity: ||A f1 - A f2|| shrinks with ||f1 - f2||
    VectorField f = catalog::random_solenoidal(grid, 3, 1, 0.5);
    VectorField dir = catalog::random_solenoidal(grid, 3, 2, 1.0);
    double prev = 1e300;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        VectorField f2 = add_scaled(f, 1.0, dir, eps);
        double d = norm_l2(add_scaled(operator_A(f, pr, fp), 1.0, operator_A(f2, pr, fp), -1.0));
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("operator_B: zero data and manufactured fixed point") {
    auto grid = make_grid(2, 16, 2.0 * M_PI);
    CbfParams p = make_params(2, 1.0, 4.0, 1.0, 3.0, grid->L);
    auto prz = zero_problem(grid, p, 1.0);
    FixedPointConfig fp;
    fp.nt = 200;
    CHECK(norm_l2(operator_B(VectorField::zero(grid), prz, fp)) == 0.0);

    Manufactured m = standard_problem(16, 200);
    double rel = norm_l2(add_scaled(operator_B(m.f_star, m.problem, fp), 1.0, m.f_star, -1.0)) /
                 norm_l2(m.f_star);
    CHECK(rel <= 1e-4);  // discretely the data makes f* an exact fixed point
    CHECK(rel <= 1e-10);
}

TEST_CASE("solve_inverse: trivial data converges immediately") {
    auto grid = make_grid(2, 16, 2.0 * M_PI);
    CbfParams p = make_params(2, 1.0, 4.0, 1.0, 3.0, grid->L);
    auto pr = zero_problem(grid, p, 1.0);
    FixedPointConfig fp;
    fp.nt = 64;
    InverseResult res = solve_inverse(pr, fp);
    CHECK(res.converged);
    CHECK(res.iterations == 1);
    CHECK(norm_l2(res.f_hat) == 0.0);
}

TEST_CASE("solve_inverse: manufactured recovery, two starts, diagnostics") {
    Manufactured m = standard_problem(16, 250);
    CHECK(m.admissibility.admissible());
    FixedPointConfig fp;
    fp.nt = 250;

    InverseResult res = solve_inverse(m.problem, fp);
    REQUIRE(res.converged);
    double fnorm = norm_l2(m.f_star);
    double rel = norm_l2(add_scaled(res.f_hat, 1.0, m.f_star, -1.0)) / fnorm;
    CHECK(rel <= 1e-3);

    // residual history tail is nonincreasing near convergence
    const auto& rh = res.residual_history;
    for (std::size_t i = rh.size() >= 5 ? rh.size() - 5 : 1; i + 1 < rh.size(); ++i)
        CHECK(rh[i + 1] <= rh[i] * (1.0 + 1e-9));

    // recovered factor is close to solenoidal
    VectorField defect = add_scaled(res.f_hat, 1.0, leray_project(res.f_hat), -1.0);
    CHECK(norm_l2(defect) <= 1e-3 * norm_l2(res.f_hat));

    // a random start lands on the same fixed point
    FixedPointConfig fp2 = fp;
    fp2.start = FixedPointConfig::Start::RandomInBall;
    fp2.seed = 99;
    InverseResult res2 = solve_inverse(m.problem, fp2);
    REQUIRE(res2.converged);
    double agree = norm_l2(add_scaled(res.f_hat, 1.0, res2.f_hat, -1.0)) /
                   std::max(norm_l2(res.f_hat), 1e-300);
    CHECK(agree <= 10.0 * fp.rel_tol);

    // self-consistency: forward with f_hat reproduces phi
    Trajectory check = solve_forward(m.problem.u0, leray_project(dealias(res.f_hat)),
                                     m.problem.g, m.problem.params, m.problem.T, fp.nt,
                                     RecordPolicy::strided(fp.nt));
    double self = norm_l2(add_scaled(check.final_state(), 1.0, m.problem.phi, -1.0)) /
                  norm_l2(m.problem.phi);
    CHECK(self <= 1e-3);
}

TEST_CASE("solve_inverse: a-priori ball radius confines iterates without scaling") {
    // admissible r > 3 setup with a defined M; dt must resolve the stiffest
    // retained mode (mu k^2 + alpha), or the integrating factor misrepresents
    // the forced response and Picard loses its contraction
    auto grid = make_grid(2, 16, 2.0 * M_PI);
    CbfParams p = make_params(2, 10.0, 80.0, 1.0, 5.0, grid->L);
    VectorField f = catalog::random_solenoidal(grid, 2, 21, 0.5);
    const double T = 10.0;
    const int nt = 8000;
    Manufactured m = manufacture(grid, p, T, nt, VectorField::zero(grid), f,
                                 Modulation::constant(1.0));
    REQUIRE(m.admissibility.admissible());
    REQUIRE(m.admissibility.M_defined);

    FixedPointConfig fp;
    fp.nt = nt;
    fp.ball_mode = FixedPointConfig::BallMode::AprioriM;
    InverseResult res = solve_inverse(m.problem, fp);
    REQUIRE(res.converged);
    CHECK(res.ball_active);
    CHECK_FALSE(res.ever_scaled);  // B maps the ball into itself here
    for (double fn : res.fnorm_history) CHECK(fn <= res.ball_radius * (1.0 + 1e-12));
    double rel = norm_l2(add_scaled(res.f_hat, 1.0, m.f_star, -1.0)) / norm_l2(m.f_star);
    CHECK(rel <= 1e-3);
}

TEST_CASE("recover_pressure: zero data and manufactured match") {
    auto grid = make_grid(2, 16, 2.0 * M_PI);
    CbfParams p = make_params(2, 1.0, 4.0, 1.0, 3.0, grid->L);
    auto prz = zero_problem(grid, p, 1.0);
    FixedPointConfig fp;
    fp.nt = 200;
    PressureRecovery zr = recover_pressure(prz, VectorField::zero(grid), fp);
    CHECK(norm_l2(zr.grad_p) == 0.0);

    Manufactured m = standard_problem(16, 250);
    fp.nt = 250;
    InverseResult res = solve_inverse(m.problem, fp);
    REQUIRE(res.converged);
    PressureRecovery prec = recover_pressure(m.problem, res.f_hat, fp);
    CHECK(prec.rel_mismatch <= 1e-3);
    CHECK(spectral_max(leray_project(prec.grad_p)) <=
          1e-9 * (1.0 + spectral_max(prec.grad_p)));
}

TEST_CASE("3D critical case: manufactured recovery at desk scale") {
    auto grid = make_grid(3, 8, 2.0 * M_PI);
    CbfParams p = make_params(3, 1.0, 4.0, 2.0, 3.0, grid->L);  // beta mu > 1
    VectorField u0 = scaled(catalog::named_field("abc1", grid), 0.2);
    VectorField f = scaled(catalog::named_field("abc2", grid), 0.5);
    Manufactured m = manufacture(grid, p, 1.0, 200, u0, f, Modulation::constant(1.0));
    CHECK(m.admissibility.regime == "1g3");
    CHECK(m.admissibility.regime_ok);  // 1/beta = 0.5 < mu = 1

    // discrete convection orthogonality holds in 3D too
    double ip = inner(convection(m.problem.phi), m.problem.phi);
    CHECK(std::abs(ip) <=
          1e-11 * std::max(1.0, norm_l2(m.problem.phi) * norm_h1_semi(m.problem.phi)));

    FixedPointConfig fp;
    fp.nt = 200;
    InverseResult res = solve_inverse(m.problem, fp);
    REQUIRE(res.converged);
    double rel = norm_l2(add_scaled(res.f_hat, 1.0, m.f_star, -1.0)) / norm_l2(m.f_star);
    CHECK(rel <= 1e-3);
}

TEST_CASE("problem validation rejects malformed data") {
    auto grid = make_grid(2, 16, 1.0);
    CbfParams p = make_params(2, 1.0, 1.0, 1.0, 3.0, grid->L);
    auto pr = zero_problem(grid, p, 1.0);

    pr.phi = catalog::random_vector(grid, 3, 4);  // not solenoidal
    CHECK_THROWS(pr.validate());
    pr.phi = VectorField::zero(grid);

    pr.grad_psi = catalog::random_solenoidal(grid, 3, 4);  // not a gradient
    CHECK_THROWS(pr.validate());
    pr.grad_psi = VectorField::zero(grid);

    pr.g = Modulation::constant(0.0);  // g(.,T) = 0
    CHECK_THROWS(pr.validate());
}

TEST_CASE("solver resolution differing from the data grid still recovers") {
    Manufactured m = standard_problem(16, 200);
    FixedPointConfig fp;
    fp.nt = 200;
    fp.n = 32;  // solve on a finer grid than the stored data
    InverseResult res = solve_inverse(m.problem, fp);
    CHECK(res.converged);
    CHECK(res.f_hat.grid().n == 16);  // mapped back to the problem grid
    double rel = norm_l2(add_scaled(res.f_hat, 1.0, m.f_star, -1.0)) / norm_l2(m.f_star);
    CHECK(rel <= 5e-2);  // dealiasing bands differ across grids
}
