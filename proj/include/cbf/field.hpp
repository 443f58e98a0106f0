#pragma once

#include <complex>
#include <vector>

#include "cbf/grid.hpp"

namespace cbf {

/// Real scalar field on a TorusGrid with paired physical/spectral
/// representations. Whichever side is missing is produced on demand by a
/// transform; the lazy caches are not synchronized, so a field must not be
/// read concurrently from multiple threads while a representation is still
/// pending (ownership transfer between threads is fine).
class ScalarField {
  public:
    ScalarField() = default;
    explicit ScalarField(GridPtr grid);

    static ScalarField from_physical(GridPtr grid, std::vector<double> values);
    static ScalarField from_spectral(GridPtr grid, std::vector<std::complex<double>> coeffs);
    static ScalarField zero(GridPtr grid);

    const TorusGrid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }

    bool has_physical() const { return phys_ok_; }
    bool has_spectral() const { return spec_ok_; }

    const std::vector<double>& physical() const;
    const std::vector<std::complex<double>>& spectral() const;

    // in-place mutation entry points; each invalidates the other representation
    std::vector<double>& mutable_physical();
    std::vector<std::complex<double>>& mutable_spectral();

  private:
    void to_physical() const;
    void to_spectral() const;

    GridPtr grid_;
    mutable std::vector<double> phys_;
    mutable std::vector<std::complex<double>> spec_;
    mutable bool phys_ok_ = false;
    mutable bool spec_ok_ = false;
};

/// d-component vector field; solenoidal flag is metadata set by the Leray
/// projection (and preserved by operations that cannot break it).
class VectorField {
  public:
    VectorField() = default;
    explicit VectorField(GridPtr grid);

    static VectorField zero(GridPtr grid);
    static VectorField from_components(std::vector<ScalarField> comps, bool solenoidal = false);

    int dim() const { return static_cast<int>(comps_.size()); }
    const TorusGrid& grid() const { return comps_.front().grid(); }
    GridPtr grid_ptr() const { return comps_.front().grid_ptr(); }

    const ScalarField& comp(int i) const { return comps_[static_cast<std::size_t>(i)]; }
    ScalarField& comp(int i) { return comps_[static_cast<std::size_t>(i)]; }

    bool solenoidal() const { return solenoidal_; }
    void set_solenoidal(bool s) { solenoidal_ = s; }

  private:
    std::vector<ScalarField> comps_;
    bool solenoidal_ = false;
};

}  // namespace cbf
