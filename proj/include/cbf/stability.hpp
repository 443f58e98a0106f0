#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbf/inverse.hpp"

namespace cbf {

/// One data-perturbation experiment: a fixed smooth direction field applied
/// at a geometric ladder of amplitudes. phi perturbations stay solenoidal,
/// grad_psi perturbations stay pure gradients, and g/g_t perturbations keep
/// min |g(.,T)| positive (the g_t shape vanishes at t = T).
struct PerturbationSpec {
    enum class Target { U0, Phi, GradPsi, G, Gt };
    Target target = Target::U0;
    double delta0 = 1e-1;
    int rungs = 5;
    double ratio = 0.5;  // delta_{j+1} = ratio * delta_j
    std::uint64_t seed = 777;
};

struct StabilityRow {
    double delta = 0.0;
    bool valid = false;
    std::string invalid_reason;

    double f_err = 0.0;       // ||f1 - f2||_H
    double u_sup_err = 0.0;   // sup_t ||u1 - u2||_H
    double u_grad_int = 0.0;  // int ||grad(u1-u2)||^2 dt
    double u_lrp1_int = 0.0;  // int ||u1-u2||^{r+1}_{L^{r+1}} dt
    double p_proxy = 0.0;     // |k|^{-2}-weighted grad p mismatch, L^{(r+1)/r} in time

    // data differences entering the stability bounds
    double d_u0 = 0.0;
    double d_g = 0.0;
    double d_gt = 0.0;
    double d_grad_phi = 0.0;
    double d_psi_lap = 0.0;  // ||grad(psi1-psi2) - mu lap(phi1-phi2)||

    double data_pow_sum = 0.0;  // sum of the five 2/(r+1)-powered differences
    double data_sum = 0.0;      // unpowered sum (for the f-stability ratio)
};

struct StabilityTable {
    std::vector<StabilityRow> rows;  // delta strictly decreasing
    double r = 3.0;
    double rel_tol = 1e-8;  // inverse solver tolerance, for the error floor

    // base-solution magnitudes, the per-column scales of the error floor
    double base_f_norm = 0.0;
    double base_u_sup = 0.0;
    double base_grad_int = 0.0;
    double base_lrp1_int = 0.0;
    double base_p_proxy = 0.0;
};

enum class ErrorColumn { F, USup, UGradInt, ULrp1Int, PProxy };

StabilityTable run_stability_sweep(const InverseProblem& base, const PerturbationSpec& spec,
                                   const FixedPointConfig& config, int threads = 1);

struct ExponentFit {
    bool ok = false;
    std::string reason;
    double exponent = 0.0;
    double r_squared = 0.0;
};

/// Least-squares slope of log(error) against log(delta) over the valid rows
/// that survive the error floor. Needs >= 4 usable rows, all errors > 0.
ExponentFit fit_holder_exponent(const StabilityTable& table, ErrorColumn column);

struct FStabilityVerdict {
    std::vector<double> ratios;  // ||f1-f2|| / (data-difference sum), per usable row
    double max_ratio = 0.0;
    double min_ratio = 0.0;
    bool pass = false;  // finite and stable: max/min <= 10
};

FStabilityVerdict check_f_stability_bound(const StabilityTable& table);

/// Rows excluded from a column's fit: invalid, or that column's error below
/// 10 * rel_tol * (base magnitude of the column) - the solver-tolerance floor.
bool row_usable_for_fit(const StabilityTable& table, const StabilityRow& row,
                        ErrorColumn column);

double column_value(const StabilityRow& row, ErrorColumn column);
std::string column_name(ErrorColumn column);

}  // namespace cbf
