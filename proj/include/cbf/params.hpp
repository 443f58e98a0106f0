#pragma once

#include <stdexcept>
#include <string>

namespace cbf {

/// Physical constants of the damped Navier-Stokes system. mu is the Brinkman
/// (effective viscosity) coefficient, alpha the Darcy coefficient, beta the
/// Forchheimer coefficient and r the absorption exponent. In 3D the
/// well-posed range is r >= 3.
struct CbfParams {
    double mu = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
    double r = 3.0;
    int d = 2;
    double L = 2.0 * 3.14159265358979323846;

    void validate() const {
        if (!(mu > 0.0)) throw std::invalid_argument("CbfParams: mu must be positive");
        if (!(alpha > 0.0)) throw std::invalid_argument("CbfParams: alpha must be positive");
        if (!(beta > 0.0)) throw std::invalid_argument("CbfParams: beta must be positive");
        if (!(r >= 1.0)) throw std::invalid_argument("CbfParams: r must be >= 1");
        if (d != 2 && d != 3) throw std::invalid_argument("CbfParams: d must be 2 or 3");
        if (d == 3 && r < 3.0)
            throw std::invalid_argument("CbfParams: r >= 3 required for d = 3");
        if (!(L > 0.0)) throw std::invalid_argument("CbfParams: L must be positive");
    }
};

}  // namespace cbf
