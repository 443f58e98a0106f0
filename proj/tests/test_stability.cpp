#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "cbf/catalog.hpp"
#include "cbf/manufacture.hpp"
#include "cbf/spectral.hpp"
#include "cbf/stability.hpp"

using namespace cbf;

namespace {

StabilityTable synthetic_table(const std::function<double(double)>& error_of_delta,
                               int rungs = 6) {
    StabilityTable t;
    t.r = 3.0;
    t.rel_tol = 1e-12;
    t.base_f_norm = 1.0;
    for (int j = 0; j < rungs; ++j) {
        StabilityRow row;
        row.delta = 1e-1 * std::pow(0.5, j);
        double e = error_of_delta(row.delta);
        row.valid = true;
        row.f_err = e;
        row.u_sup_err = e;
        row.u_grad_int = e;
        row.u_lrp1_int = e;
        row.p_proxy = e;
        row.data_sum = row.delta;
        row.data_pow_sum = std::pow(row.delta, 0.5);
        t.rows.push_back(row);
    }
    return t;
}

}  // namespace

TEST_CASE("exponent fit recovers exact power laws") {
    auto lin = synthetic_table([](double d) { return d; });
    ExponentFit f1 = fit_holder_exponent(lin, ErrorColumn::F);
    REQUIRE(f1.ok);
    CHECK(f1.exponent == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(f1.r_squared == doctest::Approx(1.0).epsilon(1e-10));

    auto half = synthetic_table([](double d) { return std::sqrt(d); });
    ExponentFit f2 = fit_holder_exponent(half, ErrorColumn::USup);
    REQUIRE(f2.ok);
    CHECK(f2.exponent == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("exponent fit tolerates mild multiplicative noise") {
    // error = 3 delta^{1/2} with a +-1% deterministic ripple
    int k = 0;
    auto noisy = synthetic_table([&k](double d) {
        double wiggle = 1.0 + ((k++ % 2 == 0) ? 0.01 : -0.01);
        return 3.0 * std::sqrt(d) * wiggle;
    });
    ExponentFit f = fit_holder_exponent(noisy, ErrorColumn::F);
    REQUIRE(f.ok);
    CHECK(std::abs(f.exponent - 0.5) <= 0.05);
}

TEST_CASE("exponent fit is scale invariant") {
    auto base = synthetic_table([](double d) { return std::pow(d, 0.7); });
    auto scaled_tab = base;
    for (auto& row : scaled_tab.rows) {
        row.f_err *= 7.3;
        row.u_sup_err *= 7.3;
        row.u_grad_int *= 7.3;
        row.u_lrp1_int *= 7.3;
        row.p_proxy *= 7.3;
    }
    ExponentFit a = fit_holder_exponent(base, ErrorColumn::F);
    ExponentFit b = fit_holder_exponent(scaled_tab, ErrorColumn::F);
    REQUIRE(a.ok);
    REQUIRE(b.ok);
    CHECK(a.exponent == doctest::Approx(b.exponent).epsilon(1e-13));
}

TEST_CASE("degenerate tables are rejected with a reason") {
    auto zero = synthetic_table([](double) { return 0.0; });
    for (auto& row : zero.rows) row.valid = true;
    // zero errors fall below the usability floor -> too few rows
    ExponentFit f = fit_holder_exponent(zero, ErrorColumn::F);
    CHECK_FALSE(f.ok);
    CHECK(!f.reason.empty());

    auto few = synthetic_table([](double d) { return d; }, 3);
    ExponentFit f2 = fit_holder_exponent(few, ErrorColumn::F);
    CHECK_FALSE(f2.ok);
}

TEST_CASE("rows near the solver tolerance floor are excluded") {
    // ladder 0.1 * 2^{-j}, j = 0..5 with error = delta; floor = 10*rel_tol*1
    auto t = synthetic_table([](double d) { return d; });
    t.rel_tol = 1e-3;  // floor = 1e-2 excludes the two smallest rungs
    int usable = 0;
    for (const auto& row : t.rows)
        if (row_usable_for_fit(t, row, ErrorColumn::F)) ++usable;
    CHECK(usable == 4);
    for (const auto& row : t.rows)
        if (row.f_err < 1e-2) CHECK_FALSE(row_usable_for_fit(t, row, ErrorColumn::F));
}

TEST_CASE("f-stability ratio: constant for a linear oracle, fails when wild") {
    auto lin = synthetic_table([](double d) { return 2.0 * d; });
    FStabilityVerdict v = check_f_stability_bound(lin);
    REQUIRE(v.pass);
    for (double r : v.ratios) CHECK(r == doctest::Approx(2.0).epsilon(1e-13));

    auto wild = synthetic_table([](double d) { return d * d; });  // ratio ~ delta
    FStabilityVerdict w = check_f_stability_bound(wild);
    CHECK_FALSE(w.pass);  // varies by 2^5 > 10 across the ladder
}

TEST_CASE("sweep on a manufactured problem: monotone errors, bound respected") {
    auto grid = make_grid(2, 16, 2.0 * M_PI);
    CbfParams p;
    p.d = 2;
    p.mu = 1.0;
    p.alpha = 4.0;
    p.beta = 1.0;
    p.r = 3.0;
    p.L = grid->L;
    VectorField u0 = scaled(catalog::named_field("tg1", grid), 0.3);
    VectorField f = catalog::named_field("band1", grid);
    Manufactured m = manufacture(grid, p, 1.0, 128, u0, f, Modulation::constant(1.0));
    REQUIRE(m.admissibility.admissible());

    FixedPointConfig fp;
    fp.nt = 128;
    PerturbationSpec spec;
    spec.target = PerturbationSpec::Target::U0;
    spec.delta0 = 1e-1;
    spec.rungs = 5;
    spec.ratio = 0.5;
    spec.seed = 4242;

    StabilityTable table = run_stability_sweep(m.problem, spec, fp, /*threads=*/2);
    REQUIRE(table.rows.size() == 5);
    for (const auto& row : table.rows) CHECK(row.valid);

    // deltas strictly decreasing, errors monotone nonincreasing above the floor
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        CHECK(table.rows[i].delta < table.rows[i - 1].delta);
        if (row_usable_for_fit(table, table.rows[i], ErrorColumn::F) &&
            row_usable_for_fit(table, table.rows[i - 1], ErrorColumn::F))
            CHECK(table.rows[i].f_err <= table.rows[i - 1].f_err * (1.0 + 1e-9));
    }

    // upper-bound respect: C calibrated on the largest delta
    const double e = 2.0 / (p.r + 1.0);
    double C = table.rows.front().f_err / std::pow(table.rows.front().delta, e);
    for (const auto& row : table.rows)
        if (row_usable_for_fit(table, row, ErrorColumn::F))
            CHECK(row.f_err <= C * std::pow(row.delta, e) * (1.0 + 1e-9));

    // u0 perturbations: the data bracket reduces to the u0 term
    for (const auto& row : table.rows) {
        CHECK(row.d_u0 == doctest::Approx(row.delta).epsilon(1e-10));
        CHECK(row.d_g == 0.0);
    }

    FStabilityVerdict fs = check_f_stability_bound(table);
    CHECK(fs.pass);

    // threads must not change results: rerun serial and compare bitwise
    StabilityTable serial = run_stability_sweep(m.problem, spec, fp, /*threads=*/1);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        CHECK(table.rows[i].f_err == serial.rows[i].f_err);
        CHECK(table.rows[i].u_sup_err == serial.rows[i].u_sup_err);
    }
}

TEST_CASE("g and g_t perturbations keep the problem valid") {
    auto grid = make_grid(2, 16, 2.0 * M_PI);
    CbfParams p;
    p.d = 2;
    p.mu = 1.0;
    p.alpha = 4.0;
    p.beta = 1.0;
    p.r = 3.0;
    p.L = grid->L;
    VectorField f = catalog::named_field("tg1", grid);
    Manufactured m = manufacture(grid, p, 1.0, 96, VectorField::zero(grid), f,
                                 Modulation::constant(1.0));

    FixedPointConfig fp;
    fp.nt = 96;
    for (auto target : {PerturbationSpec::Target::G, PerturbationSpec::Target::Gt}) {
        PerturbationSpec spec;
        spec.target = target;
        spec.delta0 = 1e-2;
        spec.rungs = 5;
        spec.seed = 7;
        StabilityTable table = run_stability_sweep(m.problem, spec, fp);
        for (const auto& row : table.rows) {
            CHECK(row.valid);
            if (target == PerturbationSpec::Target::G) {
                CHECK(row.d_g == doctest::Approx(row.delta));
                CHECK(row.d_gt == 0.0);
            } else {
                CHECK(row.d_gt == doctest::Approx(row.delta));
                CHECK(row.d_g == doctest::Approx(row.delta * m.problem.T));
            }
        }
    }
}
