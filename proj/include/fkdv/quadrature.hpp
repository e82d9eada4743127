#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fkdv {

/// Gauss-Legendre rule on [-1, 1]; nodes/weights computed once per order by
/// Newton iteration on the Legendre recurrence and cached.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussLegendre& gauss_legendre(std::size_t order);

/// Composite Gauss-Legendre integral of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::size_t panels = 8, std::size_t order = 16);

/// Truncated Taylor expansions about a point; enough arithmetic to push
/// derivatives through 1/(.) and exp(.) compositions at machine precision.
class TaylorSeries {
  public:
    TaylorSeries(std::size_t order, double constant);
    static TaylorSeries variable(std::size_t order, double x0);

    std::size_t order() const noexcept { return c_.size() - 1; }
    double coeff(std::size_t j) const { return c_[j]; }
    double& coeff(std::size_t j) { return c_[j]; }

    TaylorSeries operator+(const TaylorSeries& o) const;
    TaylorSeries operator-(const TaylorSeries& o) const;
    TaylorSeries operator*(const TaylorSeries& o) const;
    TaylorSeries operator*(double a) const;
    TaylorSeries reciprocal() const; // requires nonzero constant term
    TaylorSeries exp() const;

    /// j-th derivative of the represented function: j! * coeff(j).
    double derivative(std::size_t j) const;

  private:
    std::vector<double> c_;
};

} // namespace fkdv
