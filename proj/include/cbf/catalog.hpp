#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbf/field.hpp"
#include "cbf/modulation.hpp"

namespace cbf::catalog {

/// Builtin smooth solenoidal fields: stream-function generated in 2D,
/// curl generated in 3D. Names: zero, tg1, tg2, band1 (2D);
/// zero, abc1, abc2 (3D). Unknown names throw.
VectorField named_field(const std::string& name, const GridPtr& grid);
std::vector<std::string> field_names(int d);

/// Spatial factors a(x) for separable modulations: "one",
/// "two_plus_cosx1" = 2 + cos(2 pi x_1 / L).
ScalarField named_gspace(const std::string& name, const GridPtr& grid);

/// Seeded random fields, band-limited to |k|_inf <= kmax and normalized to
/// the requested H norm.
VectorField random_solenoidal(const GridPtr& grid, int kmax, std::uint64_t seed,
                              double norm = 1.0);
VectorField random_vector(const GridPtr& grid, int kmax, std::uint64_t seed, double norm = 1.0);
VectorField random_gradient(const GridPtr& grid, int kmax, std::uint64_t seed, double norm = 1.0);
ScalarField random_scalar(const GridPtr& grid, int kmax, std::uint64_t seed, double norm = 1.0);

}  // namespace cbf::catalog
