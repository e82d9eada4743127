#include "fkdv/mollifier.hpp"

#include "fkdv/errors.hpp"
#include "fkdv/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace fkdv {

namespace {

double bump_unnormalized(double t) {
    const double d = 1.0 - t * t;
    if (d <= 0.0) return 0.0;
    const double e = -1.0 / d;
    if (e < -700.0) return 0.0; // exp underflows; true value is below denormal range
    return std::exp(e);
}

double normalization() {
    static const double c = [] {
        const double m = integrate([](double t) { return bump_unnormalized(t); }, -1.0, 1.0,
                                   /*panels=*/64, /*order=*/24);
        return 1.0 / m;
    }();
    return c;
}

} // namespace

Mollifier::Mollifier(double scale) : scale_(scale) {
    if (!(scale > 0.0)) throw ConfigError("mollifier scale must be positive");
}

double Mollifier::value(double x) const {
    return normalization() * bump_unnormalized(x / scale_) / scale_;
}

double Mollifier::derivative(double x, unsigned j) const {
    if (j == 0) return value(x);
    if (j > max_derivative_order)
        throw UnsupportedError("mollifier derivative order beyond the Taylor budget");
    const double t = x / scale_;
    const double d = 1.0 - t * t;
    if (d <= 0.0) return 0.0;
    if (-1.0 / d < -700.0) return 0.0;
    // rho = exp(-1/(1-t^2)); expand the exponent and exponentiate as series.
    TaylorSeries tv = TaylorSeries::variable(j, t);
    TaylorSeries one(j, 1.0);
    TaylorSeries denom = one - tv * tv;
    TaylorSeries rho = (denom.reciprocal() * (-1.0)).exp();
    const double unit_deriv = normalization() * rho.derivative(j);
    return unit_deriv / std::pow(scale_, static_cast<double>(j) + 1.0);
}

double Mollifier::mass(double a, double b) const {
    const double lo = std::max(a, -scale_);
    const double hi = std::min(b, scale_);
    if (hi <= lo) return 0.0;
    // Panel count follows the covered fraction of the support.
    const std::size_t panels =
        std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(16.0 * (hi - lo) / scale_)));
    return integrate([this](double y) { return value(y); }, lo, hi, panels, 16);
}

double Mollifier::mass_below(double x) const { return mass(-scale_, x); }

} // namespace fkdv
