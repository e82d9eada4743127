#pragma once

#include "fkdv/grid.hpp"

#include <complex>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace fkdv {

using cplx = std::complex<double>;

/// Real-valued grid function with an on-demand spectral view.
///
/// A Field is immutable once constructed; every operation returns a fresh
/// Field, so sharing across threads read-only is safe. The cached spectrum
/// holds the coefficients c_k of u(x) = sum_k c_k exp(i xi_k x) for the
/// non-negative half of the wavenumber set (conjugate symmetry supplies the
/// rest); the cache is filled lazily under a lock, and since values can
/// never change after construction there is nothing to invalidate.
class Field {
  public:
    Field(GridPtr grid, std::vector<double> values);
    Field(GridPtr grid, std::vector<cplx> spectrum); // synthesizes values

    const Grid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_->size(); }

    std::span<const double> values() const noexcept { return *values_; }
    double value(std::size_t j) const { return (*values_)[j]; }

    /// Half-spectrum coefficients, length n/2+1. Computed on first use.
    std::span<const cplx> spectrum() const;

    /// New field with different samples on the same grid (fresh cache).
    Field with_values(std::vector<double> values) const;

    bool finite() const;

  private:
    struct Cache;
    GridPtr grid_;
    std::shared_ptr<const std::vector<double>> values_;
    std::shared_ptr<Cache> cache_;
};

Field zero_field(GridPtr grid);

/// Samples f at the grid points.
template <typename F>
Field sample_field(GridPtr grid, F&& f) {
    std::vector<double> v(grid->size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid->point(j));
    return Field(std::move(grid), std::move(v));
}

} // namespace fkdv
