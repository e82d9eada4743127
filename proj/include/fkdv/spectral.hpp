#pragma once

#include "fkdv/field.hpp"
#include "fkdv/grid.hpp"

#include <span>
#include <vector>

namespace fkdv {

namespace detail {
// Raw periodic transforms. forward returns the coefficients c_k of
// u(x) = sum c_k exp(i xi_k x) for k = 0..n/2; inverse synthesizes samples.
std::vector<cplx> forward_transform(const Grid& g, std::span<const double> values);
std::vector<double> inverse_transform(const Grid& g, std::span<const cplx> half_spectrum);
} // namespace detail

enum class SymbolKind { Riesz, Hilbert, Derivative, Bessel, Dispersion, Custom };

/// Fourier multiplier m(xi) sampled on a grid's wavenumber set.
///
/// Only multipliers mapping real fields to real fields are representable:
/// m(-xi) must equal conj(m(xi)). Odd imaginary symbols are zeroed at the
/// unpaired Nyquist mode to keep that symmetry exact.
class MultiplierSymbol {
  public:
    static MultiplierSymbol riesz(GridPtr g, double s);
    static MultiplierSymbol hilbert(GridPtr g);
    static MultiplierSymbol derivative(GridPtr g, unsigned order);
    static MultiplierSymbol bessel(GridPtr g, double s);
    static MultiplierSymbol dispersion(GridPtr g, double alpha);
    /// (i xi)^j * |xi|^s, the composed operator d^j/dx^j D^s.
    static MultiplierSymbol mixed(GridPtr g, unsigned j, double s);
    /// Full-length table in FFT order; rejects non-Hermitian tables.
    static MultiplierSymbol custom(GridPtr g, const std::vector<cplx>& full_table);

    const Grid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    SymbolKind kind() const noexcept { return kind_; }

    /// Samples at xi_k for k = 0..n/2.
    std::span<const cplx> half_samples() const noexcept { return half_; }

    /// Samples on the full wavenumber table (FFT order).
    std::vector<cplx> full_table() const;

    /// Pointwise product symbol (operator composition).
    MultiplierSymbol composed_with(const MultiplierSymbol& other) const;

  private:
    MultiplierSymbol(GridPtr g, SymbolKind kind, std::vector<cplx> half);
    GridPtr grid_;
    SymbolKind kind_;
    std::vector<cplx> half_;
};

/// Applies m to f's spectrum. Throws GridMismatchError / FieldError.
Field apply_multiplier(const Field& f, const MultiplierSymbol& m);

Field frac_deriv(const Field& f, double s);
Field hilbert(const Field& f);
Field bessel(const Field& f, double s);
Field x_derivative(const Field& f, unsigned order);
/// d^j/dx^j D^s f as a single multiplier application.
Field mixed_deriv(const Field& f, unsigned j, double s);

/// ||J^s f||_2 via the spectral Parseval sum.
double sobolev_norm(const Field& f, double s);
/// p in {1, 2, inf}: trapezoidal L1, discrete L2, max-abs. p = 0 means inf.
double lp_norm(const Field& f, double p);
double linf_norm(const Field& f);
/// ||f||_2 from the spectral side (Parseval cross-check).
double l2_norm_spectral(const Field& f);

/// Zeroes every mode with half-spectrum index k > keep_max.
Field truncate_modes(const Field& f, std::size_t keep_max);
/// Keeps only modes with k in [k_lo, k_hi].
Field bandpass_modes(const Field& f, std::size_t k_lo, std::size_t k_hi);

double dealias_cutoff_index(const Grid& g); // two-thirds rule: floor(n/3)

/// Discrete inner product h * sum f g.
double inner(const Field& f, const Field& g);

/// Pointwise product with a sampled weight.
Field multiply_pointwise(const Field& f, std::span<const double> w);
Field multiply_pointwise(const Field& f, const Field& g);

} // namespace fkdv
