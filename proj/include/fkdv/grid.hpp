#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace fkdv {

/// Uniform periodic grid on [-L, L) with n evenly spaced points.
///
/// Wavenumbers follow the usual FFT layout k = 0, 1, ..., n/2, -n/2+1, ..., -1
/// scaled by pi/L, so xi[k] = pi*k/L on the symmetric index set with a single
/// unpaired mode at the Nyquist index n/2.
class Grid {
  public:
    Grid(std::size_t n_points, double half_length);

    std::size_t size() const noexcept { return n_; }
    double half_length() const noexcept { return half_length_; }
    double spacing() const noexcept { return spacing_; }
    std::size_t nyquist_index() const noexcept { return n_ / 2; }
    std::size_t spectrum_size() const noexcept { return n_ / 2 + 1; }

    double point(std::size_t j) const { return -half_length_ + spacing_ * static_cast<double>(j); }

    /// Wavenumber table in FFT order (length n).
    const std::vector<double>& wavenumbers() const noexcept { return xi_; }

    /// Wavenumber of the non-negative half-spectrum entry k (0 <= k <= n/2).
    double xi(std::size_t k) const { return xi_[k]; }

    double max_wavenumber() const { return xi_[n_ / 2]; }

    bool operator==(const Grid& other) const noexcept {
        return n_ == other.n_ && half_length_ == other.half_length_;
    }

  private:
    std::size_t n_;
    double half_length_;
    double spacing_;
    std::vector<double> xi_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Validates n_points (even, >= 8) and half_length (> 0); throws ConfigError.
GridPtr make_grid(std::size_t n_points, double half_length);

} // namespace fkdv
