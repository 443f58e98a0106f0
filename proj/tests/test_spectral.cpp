#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "cbf/catalog.hpp"
#include "cbf/spectral.hpp"
#include "test_helpers.hpp"

using namespace cbf;
using cbf::testing::sample_scalar;
using cbf::testing::sample_vector;

TEST_CASE("make_grid wavenumbers and validation") {
    auto g = make_grid(2, 8, 2.0 * M_PI);
    std::multiset<int> freqs(g->freq.begin(), g->freq.end());
    CHECK(freqs == std::multiset<int>{0, 1, 2, 3, -4, -3, -2, -1});
    for (int m = 0; m < 8; ++m) CHECK(g->wavenumbers[m] == doctest::Approx(g->freq[m]));

    auto g1 = make_grid(2, 8, 1.0);
    for (int m = 0; m < 8; ++m)
        CHECK(g1->wavenumbers[m] == doctest::Approx(2.0 * M_PI * g->freq[m]));

    CHECK_THROWS(make_grid(3, 7, 1.0));   // odd n
    CHECK_THROWS(make_grid(2, 6, 1.0));   // n < 8
    CHECK_THROWS(make_grid(2, 8, 0.0));   // L <= 0
    CHECK_THROWS(make_grid(4, 8, 1.0));   // bad dimension

    // wavenumber 0 appears exactly once per axis; keep mask symmetric in k
    CHECK(std::count(g->freq.begin(), g->freq.end(), 0) == 1);
    for (int m = 0; m < 8; ++m) {
        int k = g->freq[m];
        if (k == -4) continue;  // unpaired frequency
        auto it = std::find(g->freq.begin(), g->freq.end(), -k);
        REQUIRE(it != g->freq.end());
        CHECK(g->axis_keep[m] == g->axis_keep[static_cast<std::size_t>(it - g->freq.begin())]);
    }
}

TEST_CASE("physical <-> spectral round trip and conjugate symmetry") {
    auto grid = make_grid(2, 16, 1.0);
    VectorField v = catalog::random_vector(grid, 6, 42);
    for (int a = 0; a < 2; ++a) {
        ScalarField s = v.comp(a);
        std::vector<double> orig = s.physical();
        ScalarField back = ScalarField::from_spectral(grid, s.spectral());
        const auto& round = back.physical();
        double scale = 0.0, err = 0.0;
        for (std::size_t i = 0; i < orig.size(); ++i) {
            scale = std::max(scale, std::abs(orig[i]));
            err = std::max(err, std::abs(orig[i] - round[i]));
        }
        CHECK(err <= 1e-12 * std::max(scale, 1.0));

        // conjugate symmetry of the coefficients of a real field
        const auto& sp = s.spectral();
        const int n = grid->n;
        double sym_err = 0.0;
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1) {
                int j0 = (n - i0) % n, j1 = (n - i1) % n;
                auto z = sp[static_cast<std::size_t>(i0) * n + i1];
                auto w = sp[static_cast<std::size_t>(j0) * n + j1];
                sym_err = std::max(sym_err, std::abs(z - std::conj(w)));
            }
        CHECK(sym_err <= 1e-12);
    }
}

TEST_CASE("spectral derivatives are exact on single modes") {
    for (double L : {2.0 * M_PI, 1.0}) {
        auto grid = make_grid(2, 16, L);
        const double th = 2.0 * M_PI / L;
        ScalarField s = sample_scalar(
            grid, [th](const std::array<double, 3>& x) { return std::sin(th * x[0]); });
        VectorField g = gradient(s);
        ScalarField expect = sample_scalar(
            grid, [th](const std::array<double, 3>& x) { return th * std::cos(th * x[0]); });
        const auto& gx = g.comp(0).physical();
        const auto& ex = expect.physical();
        for (std::size_t i = 0; i < gx.size(); ++i)
            CHECK(gx[i] == doctest::Approx(ex[i]).epsilon(1e-12).scale(th));
        CHECK(norm_linf(ScalarField(g.comp(1))) <= 1e-12 * th);
    }
}

TEST_CASE("div(grad) equals laplacian; laplacian of constant vanishes") {
    auto grid = make_grid(2, 16, 2.0);
    ScalarField s = catalog::random_scalar(grid, 5, 7);
    ScalarField dg = divergence(gradient(s));
    ScalarField lap = laplacian(s);
    ScalarField diff = add_scaled(dg, 1.0, lap, -1.0);
    CHECK(norm_linf(diff) <= 1e-12 * std::max(1.0, norm_linf(lap)));

    ScalarField c = ScalarField::from_physical(grid, std::vector<double>(grid->size(), 3.5));
    CHECK(norm_linf(laplacian(c)) <= 1e-13);
}

TEST_CASE("Leray projection annihilates gradients and fixes solenoidal fields") {
    auto grid = make_grid(2, 16, 2.0 * M_PI);

    ScalarField q = sample_scalar(
        grid, [](const std::array<double, 3>& x) { return std::sin(x[0]); });
    VectorField gq = gradient(q);
    VectorField pgq = leray_project(gq);
    CHECK(norm_l2(pgq) <= 1e-12 * norm_l2(gq));

    VectorField sol = cbf::testing::taylor_green(grid);
    VectorField psol = leray_project(sol);
    VectorField diff = add_scaled(psol, 1.0, sol, -1.0);
    CHECK(norm_l2(diff) <= 1e-12 * norm_l2(sol));

    // constant field passes through (k = 0 mode untouched)
    VectorField c = sample_vector(grid, {[](const std::array<double, 3>&) { return 1.25; },
                                         [](const std::array<double, 3>&) { return -0.5; }});
    VectorField pc = leray_project(c);
    VectorField cdiff = add_scaled(pc, 1.0, c, -1.0);
    CHECK(norm_l2(cdiff) <= 1e-13);

    // solenoidal output flag is backed by an actually tiny divergence
    VectorField rnd = catalog::random_vector(grid, 6, 11);
    VectorField prnd = leray_project(rnd);
    CHECK(prnd.solenoidal());
    CHECK(divergence_max_spectral(prnd) <= 1e-10 * (1.0 + spectral_max(prnd)));
}

TEST_CASE("Leray projection is idempotent, self-adjoint and orthogonal to gradients") {
    auto grid = make_grid(2, 16, 1.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        VectorField v = catalog::random_vector(grid, 7, 100 + seed);
        VectorField w = catalog::random_vector(grid, 7, 200 + seed);
        VectorField pv = leray_project(v);
        VectorField ppv = leray_project(pv);
        VectorField idem = add_scaled(ppv, 1.0, pv, -1.0);
        CHECK(norm_l2(idem) <= 1e-11 * std::max(1.0, norm_l2(pv)));

        double lhs = inner(pv, w);
        double rhs = inner(v, leray_project(w));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));

        ScalarField q = catalog::random_scalar(grid, 7, 300 + seed);
        CHECK(std::abs(inner(pv, gradient(q))) <=
              1e-11 * std::max(1.0, norm_l2(pv) * norm_l2(gradient(q))));
    }
}

TEST_CASE("dealias zeroes the upper third and is idempotent") {
    auto grid = make_grid(2, 12, 1.0);  // kmax = 4
    ScalarField low = catalog::random_scalar(grid, 3, 5);
    ScalarField dlow = dealias(low);
    ScalarField ldiff = add_scaled(dlow, 1.0, low, -1.0);
    CHECK(norm_linf(ldiff) <= 1e-13);

    // a pure n/2 mode must vanish
    std::vector<std::complex<double>> sp(grid->size(), {0.0, 0.0});
    // mode (n/2, 0) lives at flat index (n/2)*n
    sp[static_cast<std::size_t>(grid->n / 2) * grid->n] = {1.0, 0.0};
    ScalarField nyq = ScalarField::from_spectral(grid, std::move(sp));
    CHECK(norm_l2(dealias(nyq)) <= 1e-14);

    ScalarField any = catalog::random_scalar(grid, 6, 9);
    ScalarField d1 = dealias(any);
    ScalarField d2 = dealias(d1);
    ScalarField idiff = add_scaled(d2, 1.0, d1, -1.0);
    CHECK(norm_linf(idiff) <= 1e-14);
}

TEST_CASE("norms: constants, exact sin^2 quadrature, p = 2 consistency") {
    auto grid = make_grid(2, 16, 1.0);
    VectorField c = sample_vector(grid, {[](const std::array<double, 3>&) { return -2.5; },
                                         [](const std::array<double, 3>&) { return 0.0; }});
    CHECK(norm_l2(c) == doctest::Approx(2.5).epsilon(1e-14));

    // independent quadrature oracle for u = (sin 2 pi x, 0) on the unit torus
    const int n = grid->n;
    double oracle = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double v = std::sin(2.0 * M_PI * i / n);
            oracle += v * v / (n * n);
        }
    CHECK(oracle == doctest::Approx(0.5).epsilon(1e-15));

    VectorField u = sample_vector(
        grid, {[](const std::array<double, 3>& x) { return std::sin(2.0 * M_PI * x[0]); },
               [](const std::array<double, 3>&) { return 0.0; }});
    CHECK(norm_l2(u) * norm_l2(u) == doctest::Approx(0.5).epsilon(1e-14));

    CHECK(norm_lp(u, 2.0) == doctest::Approx(norm_l2(u)).epsilon(1e-12));
    CHECK_THROWS(norm_lp(u, 0.5));
}

TEST_CASE("Parseval: physical quadrature equals weighted coefficient sum") {
    auto grid = make_grid(2, 16, 2.0);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        VectorField v = catalog::random_vector(grid, 7, 400 + seed);
        double phys = norm_l2(v);
        double spec = 0.0;
        double vol = grid->L * grid->L;
        for (int a = 0; a < 2; ++a)
            for (const auto& z : v.comp(a).spectral()) spec += std::norm(z);
        spec = std::sqrt(spec * vol);
        CHECK(phys == doctest::Approx(spec).epsilon(1e-12));
    }
}

TEST_CASE("3D operators: round trip, projection, derivative identity") {
    auto grid = make_grid(3, 8, 1.0);
    VectorField v = catalog::random_vector(grid, 2, 77);
    VectorField pv = leray_project(v);
    CHECK(divergence_max_spectral(pv) <= 1e-11 * (1.0 + spectral_max(pv)));
    VectorField ppv = leray_project(pv);
    CHECK(norm_l2(add_scaled(ppv, 1.0, pv, -1.0)) <= 1e-12 * std::max(1.0, norm_l2(pv)));

    ScalarField s = catalog::random_scalar(grid, 2, 78);
    ScalarField diff = add_scaled(divergence(gradient(s)), 1.0, laplacian(s), -1.0);
    CHECK(norm_linf(diff) <= 1e-11 * std::max(1.0, norm_linf(laplacian(s))));
}

TEST_CASE("spectral resampling preserves band-limited fields") {
    auto g16 = make_grid(2, 16, 1.0);
    auto g32 = make_grid(2, 32, 1.0);
    VectorField v = catalog::random_vector(g16, 5, 99);
    VectorField up = resample(v, g32);
    VectorField back = resample(up, g16);
    CHECK(norm_l2(add_scaled(back, 1.0, v, -1.0)) <= 1e-12 * norm_l2(v));
    CHECK(norm_l2(up) == doctest::Approx(norm_l2(v)).epsilon(1e-12));
}
