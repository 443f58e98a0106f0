#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cbf/catalog.hpp"
#include "cbf/estimates.hpp"
#include "cbf/spectral.hpp"
#include "test_helpers.hpp"

using namespace cbf;
using cbf::testing::sample_vector;
using cbf::testing::taylor_green;

namespace {

VectorField lifted_random(const GridPtr& grid, std::uint64_t seed, double amp) {
    VectorField v = catalog::random_vector(grid, 4, seed, amp);
    std::vector<ScalarField> comps;
    for (int a = 0; a < grid->d; ++a) {
        std::vector<double> vals = v.comp(a).physical();
        double off = (a == 0) ? 1.0 : 0.5;
        for (double& x : vals) x += off;
        comps.push_back(ScalarField::from_physical(grid, std::move(vals)));
    }
    return VectorField::from_components(std::move(comps));
}

CbfParams params2d(double mu, double alpha, double beta, double r, double L) {
    CbfParams p;
    p.mu = mu;
    p.alpha = alpha;
    p.beta = beta;
    p.r = r;
    p.d = 2;
    p.L = L;
    return p;
}

}  // namespace

TEST_CASE("ledger: zero trajectory and analytic vortex decay") {
    auto grid = make_grid(2, 16, 2.0 * M_PI);
    CbfParams p = params2d(0.5, 0.5, 0.5, 1.0, grid->L);
    Modulation gone = Modulation::constant(1.0);
    VectorField z = VectorField::zero(grid);

    Trajectory zt = solve_forward(z, z, gone, p, 1.0, 32, RecordPolicy::landmarks());
    EnergyLedger zl = build_ledger(zt, z, gone, p);
    for (std::size_t i = 0; i < zl.times.size(); ++i) {
        CHECK(zl.u_h[i] == 0.0);
        CHECK(zl.ut_h[i] == 0.0);
        CHECK(zl.int_grad2[i] == 0.0);
    }

    VectorField u0 = leray_project(dealias(taylor_green(grid)));
    const double T = 0.5;
    const double lam = 2.0 * p.mu + p.alpha + p.beta;
    // every-step recording keeps the ledger quadrature below the 1e-5 target
    Trajectory traj = solve_forward(u0, z, gone, p, T, 500, RecordPolicy::every_step());
    EnergyLedger led = build_ledger(traj, z, gone, p);
    const double h0 = norm_l2(u0);
    for (std::size_t i = 0; i < led.times.size(); ++i)
        CHECK(led.u_h[i] ==
              doctest::Approx(h0 * std::exp(-lam * led.times[i])).epsilon(1e-6));

    // int_0^T ||grad u||^2 = ||grad u0||^2 (1 - e^{-2 lam T}) / (2 lam)
    double g0 = norm_h1_semi(u0);
    double expect = g0 * g0 * (1.0 - std::exp(-2.0 * lam * T)) / (2.0 * lam);
    CHECK(led.int_grad2.back() == doctest::Approx(expect).epsilon(1e-5));
}

TEST_CASE("lemma checks: zero data passes everything applicable") {
    auto grid = make_grid(2, 16, 1.0);
    CbfParams p = params2d(1.0, 1.0, 1.0, 3.0, grid->L);
    Modulation gone = Modulation::constant(1.0);
    VectorField z = VectorField::zero(grid);
    Trajectory zt = solve_forward(z, z, gone, p, 1.0, 64, RecordPolicy::landmarks());
    EnergyLedger led = build_ledger(zt, z, gone, p);
    for (const auto& v : check_all_lemmas(led, p, 1.0)) CHECK(v.pass);
}

TEST_CASE("lemma B.1 on the unforced vortex: energy equality up to quadrature") {
    auto grid = make_grid(2, 16, 2.0 * M_PI);
    CbfParams p = params2d(0.5, 0.5, 0.5, 1.0, grid->L);
    Modulation gone = Modulation::constant(1.0);
    VectorField z = VectorField::zero(grid);
    VectorField u0 = leray_project(dealias(taylor_green(grid)));
    Trajectory traj = solve_forward(u0, z, gone, p, 1.0, 512, RecordPolicy::landmarks());
    EnergyLedger led = build_ledger(traj, z, gone, p);

    LemmaVerdict v = check_lemma("B.1", led, p, 1.0);
    CHECK(v.applicable);
    CHECK(v.pass);
    // f = 0 makes the bound an energy identity up to the alpha int ||u||^2 gap
    CHECK(v.lhs <= v.rhs);
    CHECK(v.lhs >= 0.5 * v.rhs);
}

TEST_CASE("lemma RHS spot value") {
    // n-3: (4/mu) [ (1/T + alpha/8) ||u0||^2 + ||g||_0^2 ||f||^2 / alpha ]
    // with mu=2, T=4, alpha=8, ||u0||^2=9, ||g||_0=1, ||f||^2=16 -> 2*(11.25+2) = 26.5
    auto grid = make_grid(2, 16, 1.0);
    CbfParams p = params2d(2.0, 8.0, 1.0, 1.0, grid->L);
    EnergyLedger led;
    led.T = 4.0;
    led.r = 1.0;
    led.times = {0.0, 0.75, 1.0, 2.0, 4.0};  // one point inside (0.5, 1.0)
    led.u_h = {3.0, 0.0, 0.0, 0.0, 0.0};
    led.u_grad = {0.0, 0.0, 0.0, 0.0, 0.0};
    led.u_lrp1 = led.ut_h = led.lap_h = led.mix = led.u_linf = led.div_max = led.u_grad;
    led.int_grad2 = led.int_u2 = led.int_lrp1 = led.int_ut2 = led.int_lap2 = led.int_mix =
        led.u_grad;
    led.u0_h = 3.0;
    led.f_h = 4.0;
    led.g_sup = 1.0;
    led.gt_sup = 0.0;
    LemmaVerdict v = check_lemma("3.1c", led, p, 4.0);
    CHECK(v.rhs == doctest::Approx(26.5).epsilon(1e-14));
}

TEST_CASE("full lemma audit on a forced run (d=2, r=3 regime)") {
    auto grid = make_grid(2, 16, 2.0 * M_PI);
    CbfParams p = params2d(1.0, 1.0, 1.0, 3.0, grid->L);
    VectorField u0 = catalog::named_field("tg1", grid);
    VectorField f = catalog::random_solenoidal(grid, 3, 17, 0.5);
    Modulation g = Modulation::separable(
        ScalarField::from_physical(grid, std::vector<double>(grid->size(), 1.0)),
        TimeProfile::cos_plus(1.0, 2.0));
    const double T = 1.0;
    Trajectory traj = solve_forward(u0, f, g, p, T, 256, RecordPolicy::landmarks());
    EnergyLedger led = build_ledger(traj, f, g, p);
    for (const auto& v : check_all_lemmas(led, p, T)) {
        INFO("lemma ", v.lemma, " lhs ", v.lhs, " rhs ", v.rhs);
        CHECK(v.pass);
    }
}

TEST_CASE("damping identity: r = 1 exact, single-mode r = 3, refinement") {
    auto g64 = make_grid(2, 64, 2.0 * M_PI);
    VectorField u = taylor_green(g64);

    IdentityCheck c1 = verify_damping_identity(u, 1.0);
    CHECK(c1.rel_err <= 1e-12);

    IdentityCheck c3 = verify_damping_identity(u, 3.0);
    CHECK(c3.rel_err <= 1e-8);

    VectorField z = VectorField::zero(g64);
    IdentityCheck cz = verify_damping_identity(z, 3.0);
    CHECK(cz.lhs == 0.0);
    CHECK(cz.rhs == 0.0);

    // fractional r needs |u| > 0
    CHECK_THROWS(verify_damping_identity(u, 2.0));
    VectorField lift = lifted_random(g64, 5, 0.2);
    IdentityCheck cl = verify_damping_identity(lift, 2.0);
    CHECK(cl.rel_err <= 1e-6);

    // band-limited smooth field: refinement n -> 2n cuts the error at least 4x
    auto g16 = make_grid(2, 16, 2.0 * M_PI);
    auto g32 = make_grid(2, 32, 2.0 * M_PI);
    VectorField u16 = catalog::random_solenoidal(g16, 4, 33);
    VectorField u32 = resample(u16, g32);
    double e16 = verify_damping_identity(u16, 4.5).rel_err;
    double e32 = verify_damping_identity(u32, 4.5).rel_err;
    CHECK(e16 >= 4.0 * e32);
}

TEST_CASE("monotonicity: equality case, hand value, 1000 random trials") {
    auto grid = make_grid(2, 16, 1.0);
    VectorField u = catalog::random_vector(grid, 4, 2);
    MonotonicityCheck eq = verify_monotonicity(u, u, 3.0, 2.0);
    CHECK(eq.pairing == doctest::Approx(0.0));
    CHECK(eq.pass);

    // r = 3, u1 = (1,0), u2 = 0 pointwise: pairing density beta,
    // lower bound density beta/8
    VectorField one = sample_vector(grid, {[](const std::array<double, 3>&) { return 1.0; },
                                           [](const std::array<double, 3>&) { return 0.0; }});
    VectorField zero = VectorField::zero(grid);
    const double beta = 1.7;
    MonotonicityCheck hand = verify_monotonicity(one, zero, 3.0, beta);
    CHECK(hand.pairing == doctest::Approx(beta).epsilon(1e-13));
    CHECK(hand.lower_bound == doctest::Approx(beta / 8.0).epsilon(1e-13));
    CHECK(hand.pass);

    auto g8 = make_grid(2, 8, 1.0);
    int trials = 0;
    for (double r : {1.0, 3.0, 5.0}) {
        for (std::uint64_t seed = 0; seed < 334; ++seed) {
            VectorField a = catalog::random_vector(g8, 3, 1000 + seed, 1.5);
            VectorField b = catalog::random_vector(g8, 3, 5000 + seed, 1.5);
            MonotonicityCheck mc = verify_monotonicity(a, b, r, 0.8);
            CHECK(mc.pass);
            ++trials;
        }
    }
    CHECK(trials >= 1000);
}

TEST_CASE("C' positivity: zero field, random pairs, w = u cross-check") {
    auto grid = make_grid(2, 16, 1.0);
    VectorField z = VectorField::zero(grid);
    VectorField w = catalog::random_vector(grid, 4, 6);
    PositivityCheck pz = verify_cprime_positivity(z, w, 3.0);
    CHECK(pz.value == 0.0);
    CHECK(pz.pass);

    for (double r : {1.0, 2.0, 3.0, 5.0})
        for (std::uint64_t seed = 0; seed < 25; ++seed) {
            VectorField a = catalog::random_vector(grid, 4, 2000 + seed);
            VectorField b = catalog::random_vector(grid, 4, 3000 + seed);
            CHECK(verify_cprime_positivity(a, b, r).pass);
        }

    // <C'(u)u, u> = r int |u|^4 for r = 3
    VectorField u = catalog::random_vector(grid, 4, 77);
    PositivityCheck pc = verify_cprime_positivity(u, u, 3.0);
    double l4 = norm_lp(u, 4.0);
    CHECK(pc.value == doctest::Approx(3.0 * std::pow(l4, 4.0)).epsilon(1e-11));
}

TEST_CASE("verdicts are regime-gated") {
    auto grid = make_grid(2, 16, 1.0);
    CbfParams p = params2d(1.0, 1.0, 1.0, 3.0, grid->L);  // regime A
    Modulation gone = Modulation::constant(1.0);
    VectorField z = VectorField::zero(grid);
    Trajectory zt = solve_forward(z, z, gone, p, 1.0, 64, RecordPolicy::landmarks());
    EnergyLedger led = build_ledger(zt, z, gone, p);

    CHECK(check_lemma("3.2i", led, p, 1.0).applicable);
    CHECK_FALSE(check_lemma("3.2ii", led, p, 1.0).applicable);
    CHECK_FALSE(check_lemma("3.2iii", led, p, 1.0).applicable);
    CHECK_FALSE(check_lemma("3.4ii", led, p, 1.0).applicable);
    CHECK_THROWS(check_lemma("9.9", led, p, 1.0));
}
