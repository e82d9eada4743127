#include "fkdv/field.hpp"

#include "fkdv/errors.hpp"
#include "fkdv/kernels.hpp"
#include "fkdv/spectral.hpp"

#include <optional>
#include <utility>

namespace fkdv {

struct Field::Cache {
    std::mutex lock;
    std::optional<std::vector<cplx>> spectrum;
};

Field::Field(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)),
      values_(std::make_shared<const std::vector<double>>(std::move(values))),
      cache_(std::make_shared<Cache>()) {
    if (values_->size() != grid_->size())
        throw GridMismatchError("field sample count does not match grid size");
}

Field::Field(GridPtr grid, std::vector<cplx> spectrum)
    : grid_(std::move(grid)), cache_(std::make_shared<Cache>()) {
    if (spectrum.size() != grid_->spectrum_size())
        throw GridMismatchError("spectrum length does not match grid");
    values_ = std::make_shared<const std::vector<double>>(
        detail::inverse_transform(*grid_, spectrum));
    cache_->spectrum = std::move(spectrum);
}

std::span<const cplx> Field::spectrum() const {
    std::scoped_lock guard(cache_->lock);
    if (!cache_->spectrum)
        cache_->spectrum = detail::forward_transform(*grid_, *values_);
    return *cache_->spectrum;
}

Field Field::with_values(std::vector<double> values) const {
    return Field(grid_, std::move(values));
}

bool Field::finite() const { return kernels::all_finite(*values_); }

Field zero_field(GridPtr grid) {
    std::vector<double> v(grid->size(), 0.0);
    return Field(std::move(grid), std::move(v));
}

} // namespace fkdv
