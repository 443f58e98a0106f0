#pragma once

#include "cbf/field.hpp"

namespace cbf {

// Differential operators act by i*k multiplication per mode. The unpaired
// n/2 frequency has no conjugate partner, so it is treated as carrying no
// derivative (its factor is zeroed); every operator below uses the same
// convention, which keeps div(grad) == laplacian an exact identity.

VectorField gradient(const ScalarField& s);
ScalarField divergence(const VectorField& v);
ScalarField laplacian(const ScalarField& s);
VectorField laplacian(const VectorField& v);

/// Helmholtz-Hodge (Leray) projection onto divergence-free fields.
/// The k = 0 mode passes through unchanged.
VectorField leray_project(const VectorField& v);

/// Complement (I - P): the pure-gradient part of v.
VectorField leray_complement(const VectorField& v);

ScalarField dealias(const ScalarField& s);
VectorField dealias(const VectorField& v);

// Discrete norms with quadrature weight (L/n)^d per grid point. For vector
// fields |v(x)| is the pointwise Euclidean magnitude.
double norm_l2(const ScalarField& s);
double norm_l2(const VectorField& v);
double norm_h1_semi(const ScalarField& s);
double norm_h1_semi(const VectorField& v);
double norm_lp(const VectorField& v, double p);
double norm_lp(const ScalarField& s, double p);
double norm_linf(const VectorField& v);
double norm_linf(const ScalarField& s);

/// H inner product (physical quadrature).
double inner(const VectorField& a, const VectorField& b);
double inner(const ScalarField& a, const ScalarField& b);

/// Max modulus of spectral divergence / of spectral coefficients.
double divergence_max_spectral(const VectorField& v);
double spectral_max(const VectorField& v);

// Linear combinations, evaluated in spectral space.
VectorField add_scaled(const VectorField& a, double ca, const VectorField& b, double cb);
VectorField scaled(const VectorField& a, double c);
ScalarField add_scaled(const ScalarField& a, double ca, const ScalarField& b, double cb);

/// Spectral resampling onto a grid with a different n (same d, L): modes are
/// copied by integer frequency, truncating or zero-padding as needed.
ScalarField resample(const ScalarField& s, const GridPtr& target);
VectorField resample(const VectorField& v, const GridPtr& target);

}  // namespace cbf
