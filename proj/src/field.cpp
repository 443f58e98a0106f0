#include "cbf/field.hpp"

#include <stdexcept>

#include "cbf/fft.hpp"

namespace cbf {

ScalarField::ScalarField(GridPtr grid) : grid_(std::move(grid)) {
    phys_.assign(grid_->size(), 0.0);
    phys_ok_ = true;
    spec_.assign(grid_->size(), {0.0, 0.0});
    spec_ok_ = true;
}

ScalarField ScalarField::from_physical(GridPtr grid, std::vector<double> values) {
    if (values.size() != grid->size())
        throw std::invalid_argument("ScalarField: physical size mismatch");
    ScalarField f;
    f.grid_ = std::move(grid);
    f.phys_ = std::move(values);
    f.phys_ok_ = true;
    f.spec_ok_ = false;
    return f;
}

ScalarField ScalarField::from_spectral(GridPtr grid, std::vector<std::complex<double>> coeffs) {
    if (coeffs.size() != grid->size())
        throw std::invalid_argument("ScalarField: spectral size mismatch");
    ScalarField f;
    f.grid_ = std::move(grid);
    f.spec_ = std::move(coeffs);
    f.spec_ok_ = true;
    f.phys_ok_ = false;
    return f;
}

ScalarField ScalarField::zero(GridPtr grid) { return ScalarField(std::move(grid)); }

const std::vector<double>& ScalarField::physical() const {
    if (!phys_ok_) to_physical();
    return phys_;
}

const std::vector<std::complex<double>>& ScalarField::spectral() const {
    if (!spec_ok_) to_spectral();
    return spec_;
}

std::vector<double>& ScalarField::mutable_physical() {
    if (!phys_ok_) to_physical();
    spec_ok_ = false;
    return phys_;
}

std::vector<std::complex<double>>& ScalarField::mutable_spectral() {
    if (!spec_ok_) to_spectral();
    phys_ok_ = false;
    return spec_;
}

void ScalarField::to_physical() const {
    if (!spec_ok_) throw std::logic_error("ScalarField: no representation available");
    std::vector<std::complex<double>> work = spec_;
    fft::transform_nd(work, grid_->d, grid_->n, /*forward=*/false);
    phys_.resize(work.size());
    for (std::size_t i = 0; i < work.size(); ++i) phys_[i] = work[i].real();
    phys_ok_ = true;
}

void ScalarField::to_spectral() const {
    if (!phys_ok_) throw std::logic_error("ScalarField: no representation available");
    spec_.resize(phys_.size());
    for (std::size_t i = 0; i < phys_.size(); ++i) spec_[i] = {phys_[i], 0.0};
    fft::transform_nd(spec_, grid_->d, grid_->n, /*forward=*/true);
    spec_ok_ = true;
}

VectorField::VectorField(GridPtr grid) {
    comps_.reserve(static_cast<std::size_t>(grid->d));
    for (int i = 0; i < grid->d; ++i) comps_.emplace_back(grid);
    solenoidal_ = true;  // zero field
}

VectorField VectorField::zero(GridPtr grid) { return VectorField(std::move(grid)); }

VectorField VectorField::from_components(std::vector<ScalarField> comps, bool solenoidal) {
    if (comps.empty()) throw std::invalid_argument("VectorField: no components");
    if (static_cast<int>(comps.size()) != comps.front().grid().d)
        throw std::invalid_argument("VectorField: component count must equal grid dimension");
    VectorField v;
    v.comps_ = std::move(comps);
    v.solenoidal_ = solenoidal;
    return v;
}

}  // namespace cbf
