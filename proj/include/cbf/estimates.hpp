#pragma once

#include <string>
#include <vector>

#include "cbf/forward.hpp"

namespace cbf {

/// Time series of every norm and integral the a-priori estimates use,
/// sampled at a trajectory's recorded times. u_t entries are rhs-evaluated,
/// never finite-differenced. Cumulative integrals are trapezoidal on the
/// recorded grid.
struct EnergyLedger {
    std::vector<double> times;

    std::vector<double> u_h;      // ||u||_H
    std::vector<double> u_grad;   // ||grad u||_H
    std::vector<double> u_lrp1;   // ||u||_{L^{r+1}}
    std::vector<double> ut_h;     // ||u_t||_H
    std::vector<double> lap_h;    // ||lap u||_H
    std::vector<double> mix;      // int |u|^{r-1} |grad u|^2 dx
    std::vector<double> u_linf;   // ||u||_inf
    std::vector<double> div_max;  // max |spectral divergence|

    std::vector<double> int_grad2;  // cumulative int ||grad u||^2
    std::vector<double> int_u2;
    std::vector<double> int_lrp1;  // cumulative int ||u||^{r+1}
    std::vector<double> int_ut2;
    std::vector<double> int_lap2;
    std::vector<double> int_mix;

    // recorded index nearest to j T/8 for j = 0..8
    std::vector<std::size_t> landmark_idx;

    double u0_h = 0.0;
    double f_h = 0.0;
    double g_sup = 0.0;
    double gt_sup = 0.0;
    double T = 0.0;
    double r = 1.0;
};

EnergyLedger build_ledger(const Trajectory& traj, const VectorField& f, const Modulation& g,
                          const CbfParams& params);

/// One audited inequality. For absolute checks pass means
/// lhs <= rhs (1 + tol_rel); ratio-form checks (the u_t lemmas, whose
/// right-hand sides carry unnamed generic constants) pass when
/// lhs <= c_max * rhs.
struct LemmaVerdict {
    std::string lemma;
    std::string regime;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool pass = false;
    bool applicable = false;
    bool ratio_form = false;
    std::string note;
};

struct CheckOptions {
    double tol_rel = 1e-2;
    double c_max = 100.0;
};

/// Lemma identifiers: 3.1a-d, 3.2i-iii, 3.3i-vi, 3.4i-iii, B.1.
std::vector<std::string> all_lemma_ids();

LemmaVerdict check_lemma(const std::string& lemma_id, const EnergyLedger& ledger,
                         const CbfParams& params, double T, const CheckOptions& opts = {});

std::vector<LemmaVerdict> check_all_lemmas(const EnergyLedger& ledger, const CbfParams& params,
                                           double T, const CheckOptions& opts = {});

struct IdentityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double rel_err = 0.0;
};

/// <-lap u, |u|^{r-1} u> against the gradient-split form. Requires r >= 3,
/// or r in [1,3) with |u| bounded away from zero on the grid.
IdentityCheck verify_damping_identity(const VectorField& u, double r);

struct MonotonicityCheck {
    double pairing = 0.0;
    double lower_bound = 0.0;
    bool pass = false;
};

/// beta (C(u1) - C(u2), u1 - u2) >= beta / 2^r ||u1 - u2||^{r+1}_{L^{r+1}}.
MonotonicityCheck verify_monotonicity(const VectorField& u1, const VectorField& u2, double r,
                                      double beta);

struct PositivityCheck {
    double value = 0.0;
    bool pass = false;
};

/// <C'(u) w, w> >= 0.
PositivityCheck verify_cprime_positivity(const VectorField& u, const VectorField& w, double r);

}  // namespace cbf
