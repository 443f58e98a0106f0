#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cbf/field.hpp"
#include "cbf/modulation.hpp"
#include "cbf/params.hpp"

namespace cbf {

/// Raised when the velocity magnitude passes the blow-up guard, which
/// signals instability or a CFL violation of the explicit terms.
struct BlowUpError : std::runtime_error {
    BlowUpError(double time, double linf_val, int step_index)
        : std::runtime_error("blow-up guard tripped at t = " + std::to_string(time) +
                             ", |u|_inf = " + std::to_string(linf_val) + " (step " +
                             std::to_string(step_index) + ")"),
          t(time),
          linf(linf_val),
          step(step_index) {}
    double t;
    double linf;
    int step;
};

/// C(u) = |u|^{r-1} u, evaluated pointwise in physical space. The value at
/// u = 0 is 0 for every r >= 1; fractional powers go through (|u|^2)^{(r-1)/2}.
VectorField damping(const VectorField& u, double r);

/// Gateaux derivative C'(u) applied to w: three-branch formula with the
/// u = 0 branch equal to 0 for r > 1 and to w for r = 1.
VectorField damping_jacobian_apply(const VectorField& u, const VectorField& w, double r);

/// Skew-symmetric convection 0.5 [ (u.grad)u + div(u x u) ] with spectral
/// derivatives; output is dealiased and in spectral representation.
VectorField convection(const VectorField& u);

/// Solves -lap p = div[ (u.grad)u + beta C(u) - f g ] with zero-mean p and
/// returns grad p. The f g term enters in full, so spatially varying g is
/// handled.
VectorField pressure_gradient(const VectorField& u, const VectorField& f,
                              const ScalarField& g_at_t, const CbfParams& p);

/// u_t = P[ f g(.,t) - convection(u) - beta C(u) ] + mu lap u - alpha u.
VectorField rhs(const VectorField& u, const VectorField& f, const Modulation& g, double t,
                const CbfParams& p);

/// One IMEX step: the diagonal linear part -mu lap + alpha is integrated
/// exactly per mode, the rest with Heun. Output projected and dealiased.
VectorField step(const VectorField& u, double t, double dt, const VectorField& f,
                 const Modulation& g, const CbfParams& p);

struct RecordPolicy {
    enum class Mode { Landmarks, EveryStep, Stride };
    Mode mode = Mode::Landmarks;
    int stride = 1;
    bool record_grad_p = false;
    bool record_u_t = false;

    static RecordPolicy landmarks(bool grad_p = false, bool u_t = true);
    static RecordPolicy every_step(bool grad_p = false, bool u_t = true);
    static RecordPolicy strided(int s, bool grad_p = false, bool u_t = true);
};

struct Trajectory {
    std::vector<double> times;
    std::vector<VectorField> snapshots;
    std::vector<VectorField> grad_p;  // empty unless requested
    std::vector<VectorField> u_t;     // empty unless requested

    const VectorField& final_state() const { return snapshots.back(); }
    double final_time() const { return times.back(); }
};

/// Marches nt steps of size T/nt from a solenoidal u0. Snapshots are taken
/// at the policy's step indices; the default policy always covers the
/// T/16-spaced landmark times so that every (jT/8, (j+1)T/8) window holds
/// recorded interior points.
Trajectory solve_forward(const VectorField& u0, const VectorField& f, const Modulation& g,
                         const CbfParams& p, double T, int nt, const RecordPolicy& rec);

/// Blow-up guard threshold on |u|_inf.
inline constexpr double kBlowUpLimit = 1e6;

}  // namespace cbf
