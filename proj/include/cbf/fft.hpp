#pragma once

#include <complex>
#include <vector>

namespace cbf::fft {

/// In-place complex DFT along every axis of a row-major n^d array.
/// forward = physical -> coefficients, normalized by 1/n per axis so the
/// result holds true Fourier coefficients; inverse applies no scaling.
/// Radix-2 when n is a power of two, O(n^2) direct transform otherwise
/// (grids here are desk-scale, so the fallback stays cheap).
void transform_nd(std::vector<std::complex<double>>& data, int d, int n, bool forward);

void transform_1d(std::complex<double>* line, int n, bool forward);

}  // namespace cbf::fft
