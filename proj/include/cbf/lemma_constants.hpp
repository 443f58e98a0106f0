#pragma once

#include <cmath>

#include "cbf/params.hpp"

namespace cbf::consts {

// Constants appearing in the a-priori estimates, grouped by parameter
// regime. K1* cover d = 2, r in [1,3]; K2* (with gamma and eta_star) cover
// r > 3; K3* cover d = r = 3 with beta*mu > 1.

inline double K11(double r) { return 4.0 + 8.0 / (r + 1.0); }
inline double K12(double r, double alpha) { return 2.5 * alpha + alpha / (r + 1.0); }
inline double K13(double r, double alpha) { return 6.0 / alpha + 8.0 / ((r + 1.0) * alpha); }

inline double gamma_const(double r, double beta) {
    return (r - 3.0) / (r - 1.0) * std::pow(2.0 / (beta * (r - 1.0)), 2.0 / (r - 3.0));
}

// eta coefficient of the grad-u estimates, condition eta < 2 alpha
inline double eta_const(double r, double beta, double mu) {
    return 2.0 * (r - 3.0) / (mu * (r - 1.0)) *
           std::pow(4.0 / (beta * mu * (r - 1.0)), 2.0 / (r - 3.0));
}

// eta* of the u_t estimates, condition eta* < alpha
inline double eta_star(double r, double beta, double mu) {
    return (r - 3.0) / (mu * (r - 1.0)) *
           std::pow(2.0 / (beta * mu * (r - 1.0)), 2.0 / (r - 3.0));
}

inline double K21(double r, double mu) { return 4.0 + 4.0 / mu + 8.0 / (r + 1.0); }
inline double K22(double r, double alpha, double beta, double mu) {
    return 0.75 * alpha + 3.0 * alpha * gamma_const(r, beta) / (32.0 * mu);
}
inline double K23(double r, double alpha, double beta, double mu) {
    return (3.5 + 1.0 / (r + 1.0) + 0.5 / mu) * alpha + gamma_const(r, beta) / (2.0 * mu);
}
inline double K24(double r, double alpha, double beta, double mu) {
    return 3.0 / (4.0 * alpha) + 3.0 / (4.0 * mu) +
           3.0 * gamma_const(r, beta) / (4.0 * mu * alpha);
}
inline double K25(double r, double alpha, double mu) {
    return (7.0 + 4.0 / (r + 1.0) + 2.0 / mu) * 2.0 / alpha;
}

inline double K31(double beta, double mu) { return 6.0 + 2.0 / (beta * mu - 1.0); }
inline double K32(double alpha) { return 0.75 * alpha; }
inline double K33(double alpha, double beta, double mu) {
    return (15.0 + 1.0 / (beta * mu - 1.0)) * alpha / 4.0;
}
inline double K34(double alpha, double beta, double mu) {
    return 3.0 / (4.0 * alpha) + 3.0 / (8.0 * (beta * mu - 1.0));
}
inline double K35(double alpha, double beta, double mu) {
    return (8.0 + 1.0 / (beta * mu - 1.0)) * 2.0 / alpha;
}

}  // namespace cbf::consts
