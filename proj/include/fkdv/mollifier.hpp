#pragma once

#include <cstddef>

namespace fkdv {

/// The standard smooth bump rho(x) = C exp(-1/(1-x^2)) on (-1,1), scaled as
/// rho_mu(x) = rho(x/mu)/mu. Even, nonnegative, unit mass, compactly
/// supported; derivatives of any order come from Taylor arithmetic on the
/// exponent, partial masses from Gauss-Legendre panels.
class Mollifier {
  public:
    explicit Mollifier(double scale = 1.0);

    double scale() const noexcept { return scale_; }
    double support_radius() const noexcept { return scale_; }
    Mollifier rescaled(double new_scale) const { return Mollifier(new_scale); }

    /// rho_scale(x)
    double value(double x) const;
    /// d^j/dx^j rho_scale(x)
    double derivative(double x, unsigned j) const;
    /// integral of rho_scale over [a, b]
    double mass(double a, double b) const;
    /// integral of rho_scale over (-inf, x]
    double mass_below(double x) const;

    static constexpr unsigned max_derivative_order = 10;

  private:
    double scale_;
};

} // namespace fkdv
