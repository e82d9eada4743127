#include "fkdv/grid.hpp"

#include "fkdv/errors.hpp"

#include <cmath>
#include <string>

namespace fkdv {

Grid::Grid(std::size_t n_points, double half_length)
    : n_(n_points),
      half_length_(half_length),
      spacing_(2.0 * half_length / static_cast<double>(n_points)),
      xi_(n_points) {
    const double dk = M_PI / half_length_;
    for (std::size_t k = 0; k <= n_ / 2; ++k) xi_[k] = dk * static_cast<double>(k);
    for (std::size_t k = n_ / 2 + 1; k < n_; ++k)
        xi_[k] = -dk * static_cast<double>(n_ - k);
}

GridPtr make_grid(std::size_t n_points, double half_length) {
    if (n_points < 8 || n_points % 2 != 0)
        throw ConfigError("grid size must be even and >= 8, got " + std::to_string(n_points));
    if (!(half_length > 0.0) || !std::isfinite(half_length))
        throw ConfigError("grid half_length must be positive and finite");
    return std::make_shared<const Grid>(n_points, half_length);
}

} // namespace fkdv
