#include "cbf/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cbf/spectral.hpp"

namespace cbf {

double TimeProfile::value(double t) const {
    switch (kind) {
        case Kind::One: return 1.0;
        case Kind::Exp: return std::exp(p1 * t);
        case Kind::CosPlus: return std::cos(p1 * t) + p2;
    }
    return 1.0;
}

double TimeProfile::deriv(double t) const {
    switch (kind) {
        case Kind::One: return 0.0;
        case Kind::Exp: return p1 * std::exp(p1 * t);
        case Kind::CosPlus: return -p1 * std::sin(p1 * t);
    }
    return 0.0;
}

Modulation Modulation::constant(double c) {
    Modulation m;
    m.kind_ = Kind::Constant;
    m.const_value_ = c;
    return m;
}

Modulation Modulation::separable(ScalarField a, TimeProfile b) {
    Modulation m;
    m.kind_ = Kind::Separable;
    m.space_ = std::move(a);
    m.time_ = b;
    return m;
}

Modulation Modulation::tabulated(GridPtr grid, std::vector<double> times,
                                 std::vector<std::vector<double>> g_samples,
                                 std::vector<std::vector<double>> gt_samples) {
    if (times.size() < 2 || g_samples.size() != times.size() || gt_samples.size() != times.size())
        throw std::invalid_argument("Modulation::tabulated: inconsistent sample counts");
    Modulation m;
    m.kind_ = Kind::Tabulated;
    m.tab_grid_ = std::move(grid);
    m.tab_times_ = std::move(times);
    m.tab_g_ = std::move(g_samples);
    m.tab_gt_ = std::move(gt_samples);
    return m;
}

namespace {

// linear interpolation weights on a sorted time grid, clamped at the ends
void locate(const std::vector<double>& ts, double t, std::size_t& i0, double& w1) {
    if (t <= ts.front()) {
        i0 = 0;
        w1 = 0.0;
        return;
    }
    if (t >= ts.back()) {
        i0 = ts.size() - 2;
        w1 = 1.0;
        return;
    }
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    i0 = static_cast<std::size_t>(it - ts.begin()) - 1;
    double dt = ts[i0 + 1] - ts[i0];
    w1 = (dt > 0.0) ? (t - ts[i0]) / dt : 0.0;
}

}  // namespace

void Modulation::eval_into(const TorusGrid& grid, double t, std::vector<double>& out) const {
    out.assign(grid.size(), 0.0);
    const double shift = shift0_ + shift1_ * (t - shift_tref_);
    switch (kind_) {
        case Kind::Constant: {
            std::fill(out.begin(), out.end(), const_value_ + shift);
            return;
        }
        case Kind::Separable: {
            double b = time_.value(t);
            const ScalarField* a = &space_;
            ScalarField res;
            if (space_.grid().n != grid.n) {
                res = resample(space_, std::make_shared<TorusGrid>(grid));
                a = &res;
            }
            const auto& av = a->physical();
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * b + shift;
            return;
        }
        case Kind::Tabulated: {
            std::size_t i0;
            double w1;
            locate(tab_times_, t, i0, w1);
            const auto& g0 = tab_g_[i0];
            const auto& g1 = tab_g_[i0 + 1];
            if (tab_grid_->n != grid.n) {
                std::vector<double> mix(g0.size());
                for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = (1.0 - w1) * g0[i] + w1 * g1[i];
                ScalarField res = resample(ScalarField::from_physical(tab_grid_, std::move(mix)),
                                           std::make_shared<TorusGrid>(grid));
                const auto& rv = res.physical();
                for (std::size_t i = 0; i < out.size(); ++i) out[i] = rv[i] + shift;
                return;
            }
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] = (1.0 - w1) * g0[i] + w1 * g1[i] + shift;
            return;
        }
    }
}

void Modulation::eval_dt_into(const TorusGrid& grid, double t, std::vector<double>& out) const {
    out.assign(grid.size(), 0.0);
    switch (kind_) {
        case Kind::Constant: {
            std::fill(out.begin(), out.end(), shift1_);
            return;
        }
        case Kind::Separable: {
            double db = time_.deriv(t);
            const ScalarField* a = &space_;
            ScalarField res;
            if (space_.grid().n != grid.n) {
                res = resample(space_, std::make_shared<TorusGrid>(grid));
                a = &res;
            }
            const auto& av = a->physical();
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * db + shift1_;
            return;
        }
        case Kind::Tabulated: {
            std::size_t i0;
            double w1;
            locate(tab_times_, t, i0, w1);
            const auto& g0 = tab_gt_[i0];
            const auto& g1 = tab_gt_[i0 + 1];
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] = (1.0 - w1) * g0[i] + w1 * g1[i] + shift1_;
            return;
        }
    }
}

ScalarField Modulation::eval(const GridPtr& grid, double t) const {
    std::vector<double> buf;
    eval_into(*grid, t, buf);
    return ScalarField::from_physical(grid, std::move(buf));
}

ScalarField Modulation::eval_dt(const GridPtr& grid, double t) const {
    std::vector<double> buf;
    eval_dt_into(*grid, t, buf);
    return ScalarField::from_physical(grid, std::move(buf));
}

double Modulation::sup_abs(const TorusGrid& grid, double T, int time_samples) const {
    std::vector<double> buf;
    double m = 0.0;
    for (int j = 0; j <= time_samples; ++j) {
        double t = T * j / time_samples;
        eval_into(grid, t, buf);
        for (double x : buf) m = std::max(m, std::abs(x));
    }
    return m;
}

double Modulation::sup_abs_dt(const TorusGrid& grid, double T, int time_samples) const {
    std::vector<double> buf;
    double m = 0.0;
    for (int j = 0; j <= time_samples; ++j) {
        double t = T * j / time_samples;
        eval_dt_into(grid, t, buf);
        for (double x : buf) m = std::max(m, std::abs(x));
    }
    return m;
}

double Modulation::min_abs_at(const TorusGrid& grid, double t) const {
    std::vector<double> buf;
    eval_into(grid, t, buf);
    double m = std::numeric_limits<double>::infinity();
    for (double x : buf) m = std::min(m, std::abs(x));
    return m;
}

bool Modulation::spatially_constant() const {
    if (kind_ == Kind::Constant) return true;
    if (kind_ == Kind::Separable) {
        const auto& av = space_.physical();
        for (double x : av)
            if (x != av.front()) return false;
        return true;
    }
    return false;
}

Modulation Modulation::shifted(double s0, double s1, double tref) const {
    // rebase: a + b (t - t0) = [a + b (t1 - t0)] + b (t - t1)
    Modulation m = *this;
    m.shift0_ += s0 + m.shift1_ * (tref - m.shift_tref_);
    m.shift1_ += s1;
    m.shift_tref_ = tref;
    return m;
}

}  // namespace cbf
