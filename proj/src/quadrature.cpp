#include "fkdv/quadrature.hpp"

#include "fkdv/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace fkdv {

namespace {

GaussLegendre compute_rule(std::size_t n) {
    GaussLegendre rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

} // namespace

const GaussLegendre& gauss_legendre(std::size_t order) {
    static std::mutex lock;
    static std::map<std::size_t, GaussLegendre> cache;
    std::scoped_lock guard(lock);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
    return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 std::size_t panels, std::size_t order) {
    if (!(b > a)) return 0.0;
    const GaussLegendre& rule = gauss_legendre(order);
    const double dx = (b - a) / static_cast<double>(panels);
    double total = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = a + (static_cast<double>(p) + 0.5) * dx;
        double acc = 0.0;
        for (std::size_t i = 0; i < order; ++i)
            acc += rule.weights[i] * f(mid + 0.5 * dx * rule.nodes[i]);
        total += 0.5 * dx * acc;
    }
    return total;
}

// ---------------------------------------------------------- Taylor series ---

TaylorSeries::TaylorSeries(std::size_t order, double constant) : c_(order + 1, 0.0) {
    c_[0] = constant;
}

TaylorSeries TaylorSeries::variable(std::size_t order, double x0) {
    TaylorSeries s(order, x0);
    if (order >= 1) s.c_[1] = 1.0;
    return s;
}

TaylorSeries TaylorSeries::operator+(const TaylorSeries& o) const {
    TaylorSeries r(*this);
    for (std::size_t j = 0; j < c_.size(); ++j) r.c_[j] += o.c_[j];
    return r;
}

TaylorSeries TaylorSeries::operator-(const TaylorSeries& o) const {
    TaylorSeries r(*this);
    for (std::size_t j = 0; j < c_.size(); ++j) r.c_[j] -= o.c_[j];
    return r;
}

TaylorSeries TaylorSeries::operator*(const TaylorSeries& o) const {
    TaylorSeries r(order(), 0.0);
    for (std::size_t j = 0; j < c_.size(); ++j)
        for (std::size_t k = 0; j + k < c_.size(); ++k) r.c_[j + k] += c_[j] * o.c_[k];
    return r;
}

TaylorSeries TaylorSeries::operator*(double a) const {
    TaylorSeries r(*this);
    for (double& v : r.c_) v *= a;
    return r;
}

TaylorSeries TaylorSeries::reciprocal() const {
    if (c_[0] == 0.0) throw Error("TaylorSeries::reciprocal of series with zero constant term");
    TaylorSeries r(order(), 1.0 / c_[0]);
    for (std::size_t n = 1; n < c_.size(); ++n) {
        double acc = 0.0;
        for (std::size_t j = 1; j <= n; ++j) acc += c_[j] * r.c_[n - j];
        r.c_[n] = -acc / c_[0];
    }
    return r;
}

TaylorSeries TaylorSeries::exp() const {
    TaylorSeries r(order(), std::exp(c_[0]));
    for (std::size_t n = 1; n < c_.size(); ++n) {
        double acc = 0.0;
        for (std::size_t j = 1; j <= n; ++j)
            acc += static_cast<double>(j) * c_[j] * r.c_[n - j];
        r.c_[n] = acc / static_cast<double>(n);
    }
    return r;
}

double TaylorSeries::derivative(std::size_t j) const {
    double fact = 1.0;
    for (std::size_t k = 2; k <= j; ++k) fact *= static_cast<double>(k);
    return fact * c_[j];
}

} // namespace fkdv
