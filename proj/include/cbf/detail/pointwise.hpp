#pragma once

#include <cmath>
#include <vector>

#include "cbf/field.hpp"

namespace cbf::detail {

/// |u|^{r-1} from the squared magnitude, with the continuous extension 0 at
/// u = 0 (and 1 for r = 1).
inline double mag_power(double m2, double r) {
    if (r == 1.0) return 1.0;
    if (m2 == 0.0) return 0.0;
    if (r == 3.0) return m2;
    if (r == 5.0) return m2 * m2;
    if (r == 2.0) return std::sqrt(m2);
    return std::pow(m2, 0.5 * (r - 1.0));
}

inline std::vector<const std::vector<double>*> physical_comps(const VectorField& u) {
    std::vector<const std::vector<double>*> p(static_cast<std::size_t>(u.dim()));
    for (int a = 0; a < u.dim(); ++a) p[static_cast<std::size_t>(a)] = &u.comp(a).physical();
    return p;
}

}  // namespace cbf::detail
