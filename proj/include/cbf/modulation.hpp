#pragma once

#include <vector>

#include "cbf/field.hpp"

namespace cbf {

/// Closed-form time profiles b(t) available to separable modulations,
/// with exact derivatives.
struct TimeProfile {
    enum class Kind { One, Exp, CosPlus };
    Kind kind = Kind::One;
    double p1 = 0.0;  // lambda for Exp, omega for CosPlus
    double p2 = 0.0;  // offset c for CosPlus

    double value(double t) const;
    double deriv(double t) const;

    static TimeProfile one() { return {}; }
    static TimeProfile exponential(double lambda) { return {Kind::Exp, lambda, 0.0}; }
    static TimeProfile cos_plus(double omega, double c) { return {Kind::CosPlus, omega, c}; }
};

/// The scalar modulation g(x,t) of the forcing F = f(x) g(x,t), together
/// with g_t. Three kinds: constant, separable a(x) b(t), and tabulated
/// samples on (grid x time-grid) with linear interpolation in t. An additive
/// shift s0 + s1 (t - tref) supports the stability harness's data
/// perturbations without changing the underlying kind.
class Modulation {
  public:
    enum class Kind { Constant, Separable, Tabulated };

    Modulation() = default;
    static Modulation constant(double c);
    static Modulation separable(ScalarField a, TimeProfile b);
    static Modulation tabulated(GridPtr grid, std::vector<double> times,
                                std::vector<std::vector<double>> g_samples,
                                std::vector<std::vector<double>> gt_samples);

    Kind kind() const { return kind_; }
    double constant_value() const { return const_value_; }

    /// g(x,t) sampled on the given grid (physical layout).
    void eval_into(const TorusGrid& grid, double t, std::vector<double>& out) const;
    /// g_t(x,t) sampled on the given grid.
    void eval_dt_into(const TorusGrid& grid, double t, std::vector<double>& out) const;

    ScalarField eval(const GridPtr& grid, double t) const;
    ScalarField eval_dt(const GridPtr& grid, double t) const;

    /// Discrete sup norms over grid x uniform time samples of [0,T].
    double sup_abs(const TorusGrid& grid, double T, int time_samples = 256) const;
    double sup_abs_dt(const TorusGrid& grid, double T, int time_samples = 256) const;
    double min_abs_at(const TorusGrid& grid, double t) const;

    /// True when g does not vary in x (shift terms never do).
    bool spatially_constant() const;

    Modulation shifted(double s0, double s1, double tref) const;

  private:
    Kind kind_ = Kind::Constant;
    double const_value_ = 1.0;
    ScalarField space_;  // Separable
    TimeProfile time_;
    GridPtr tab_grid_;  // Tabulated
    std::vector<double> tab_times_;
    std::vector<std::vector<double>> tab_g_;
    std::vector<std::vector<double>> tab_gt_;
    double shift0_ = 0.0;
    double shift1_ = 0.0;
    double shift_tref_ = 0.0;
};

}  // namespace cbf
