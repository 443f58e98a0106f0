#pragma once

#include <string>

#include "cbf/config.hpp"
#include "cbf/inverse.hpp"

namespace cbf {

/// A ground-truth inverse problem: the forward solve from a known f*
/// supplies phi = u(.,T) and grad_psi = grad p(.,T), so the recovered
/// factor can be compared against f* exactly.
struct Manufactured {
    InverseProblem problem;
    VectorField f_star;
    Trajectory trajectory;
    AdmissibilityReport admissibility;
};

Manufactured manufacture(const GridPtr& grid, const CbfParams& params, double T, int nt,
                         const VectorField& u0, const VectorField& f_star, const Modulation& g,
                         const RecordPolicy& rec = RecordPolicy::landmarks());

Manufactured manufacture_from_config(const RunConfig& cfg);

/// Writes u0/f_star/phi/grad_psi snapshots plus problem.txt into dir.
void write_manufactured(const std::string& dir, const Manufactured& m);

}  // namespace cbf
