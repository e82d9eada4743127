#include "fkdv/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>

namespace fkdv::kernels {

namespace {
std::atomic<Exec> g_exec{Exec::Parallel};

// OpenMP loop index type; spans can exceed int on large grids.
using idx = std::int64_t;
} // namespace

Exec execution() noexcept { return g_exec.load(std::memory_order_relaxed); }
void set_execution(Exec e) noexcept { g_exec.store(e, std::memory_order_relaxed); }

// ---------------------------------------------------------------- serial ---

namespace serial {

void fill(std::span<double> x, double a) {
    for (auto& v : x) v = a;
}

void scale(std::span<double> x, double a) {
    for (auto& v : x) v *= a;
}

void add_scaled(std::span<double> y, double a, std::span<const double> x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void multiply(std::span<double> out, std::span<const double> a, std::span<const double> b) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
}

void square(std::span<double> out, std::span<const double> a) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * a[i];
}

double sum(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
}

double sum_abs(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
}

double sum_sq(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double weighted_sq_sum(std::span<const double> v, std::span<const double> w) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * v[i] * w[i];
    return s;
}

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

bool all_finite(std::span<const double> x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

void cmul(std::span<cplx> spec, std::span<const cplx> symbol) {
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= symbol[i];
}

void caxpy(std::span<cplx> y, cplx a, std::span<const cplx> x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void etdrk4_combine(std::span<cplx> y, std::span<const cplx> e, std::span<const cplx> f1,
                    std::span<const cplx> f2, std::span<const cplx> f3,
                    std::span<const cplx> n1, std::span<const cplx> n2,
                    std::span<const cplx> n3, std::span<const cplx> n4) {
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = e[i] * y[i] + f1[i] * n1[i] + 2.0 * f2[i] * (n2[i] + n3[i]) + f3[i] * n4[i];
}

} // namespace serial

// ------------------------------------------------------------------- omp ---

namespace omp {

void fill(std::span<double> x, double a) {
    const idx n = static_cast<idx>(x.size());
#pragma omp parallel for schedule(static)
    for (idx i = 0; i < n; ++i) x[i] = a;
}

void scale(std::span<double> x, double a) {
    const idx n = static_cast<idx>(x.size());
#pragma omp parallel for schedule(static)
    for (idx i = 0; i < n; ++i) x[i] *= a;
}

void add_scaled(std::span<double> y, double a, std::span<const double> x) {
    const idx n = static_cast<idx>(y.size());
#pragma omp parallel for schedule(static)
    for (idx i = 0; i < n; ++i) y[i] += a * x[i];
}

void multiply(std::span<double> out, std::span<const double> a, std::span<const double> b) {
    const idx n = static_cast<idx>(out.size());
#pragma omp parallel for schedule(static)
    for (idx i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void square(std::span<double> out, std::span<const double> a) {
    const idx n = static_cast<idx>(out.size());
#pragma omp parallel for schedule(static)
    for (idx i = 0; i < n; ++i) out[i] = a[i] * a[i];
}

double sum(std::span<const double> x) {
    const idx n = static_cast<idx>(x.size());
    double s = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : s)
    for (idx i = 0; i < n; ++i) s += x[i];
    return s;
}

double sum_abs(std::span<const double> x) {
    const idx n = static_cast<idx>(x.size());
    double s = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : s)
    for (idx i = 0; i < n; ++i) s += std::abs(x[i]);
    return s;
}

double sum_sq(std::span<const double> x) {
    const idx n = static_cast<idx>(x.size());
    double s = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : s)
    for (idx i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
    const idx n = static_cast<idx>(a.size());
    double s = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : s)
    for (idx i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double weighted_sq_sum(std::span<const double> v, std::span<const double> w) {
    const idx n = static_cast<idx>(v.size());
    double s = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : s)
    for (idx i = 0; i < n; ++i) s += v[i] * v[i] * w[i];
    return s;
}

double max_abs(std::span<const double> x) {
    const idx n = static_cast<idx>(x.size());
    double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
    for (idx i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
    return m;
}

bool all_finite(std::span<const double> x) {
    const idx n = static_cast<idx>(x.size());
    int bad = 0;
#pragma omp parallel for schedule(static) reduction(| : bad)
    for (idx i = 0; i < n; ++i) bad |= std::isfinite(x[i]) ? 0 : 1;
    return bad == 0;
}

void cmul(std::span<cplx> spec, std::span<const cplx> symbol) {
    const idx n = static_cast<idx>(spec.size());
#pragma omp parallel for schedule(static)
    for (idx i = 0; i < n; ++i) spec[i] *= symbol[i];
}

void caxpy(std::span<cplx> y, cplx a, std::span<const cplx> x) {
    const idx n = static_cast<idx>(y.size());
#pragma omp parallel for schedule(static)
    for (idx i = 0; i < n; ++i) y[i] += a * x[i];
}

void etdrk4_combine(std::span<cplx> y, std::span<const cplx> e, std::span<const cplx> f1,
                    std::span<const cplx> f2, std::span<const cplx> f3,
                    std::span<const cplx> n1, std::span<const cplx> n2,
                    std::span<const cplx> n3, std::span<const cplx> n4) {
    const idx n = static_cast<idx>(y.size());
#pragma omp parallel for schedule(static)
    for (idx i = 0; i < n; ++i)
        y[i] = e[i] * y[i] + f1[i] * n1[i] + 2.0 * f2[i] * (n2[i] + n3[i]) + f3[i] * n4[i];
}

} // namespace omp

// -------------------------------------------------------------- dispatch ---

#define FKDV_DISPATCH(call) \
    return execution() == Exec::Parallel ? omp::call : serial::call

void fill(std::span<double> x, double a) { FKDV_DISPATCH(fill(x, a)); }
void scale(std::span<double> x, double a) { FKDV_DISPATCH(scale(x, a)); }
void add_scaled(std::span<double> y, double a, std::span<const double> x) {
    FKDV_DISPATCH(add_scaled(y, a, x));
}
void multiply(std::span<double> out, std::span<const double> a, std::span<const double> b) {
    FKDV_DISPATCH(multiply(out, a, b));
}
void square(std::span<double> out, std::span<const double> a) { FKDV_DISPATCH(square(out, a)); }
double sum(std::span<const double> x) { FKDV_DISPATCH(sum(x)); }
double sum_abs(std::span<const double> x) { FKDV_DISPATCH(sum_abs(x)); }
double sum_sq(std::span<const double> x) { FKDV_DISPATCH(sum_sq(x)); }
double dot(std::span<const double> a, std::span<const double> b) { FKDV_DISPATCH(dot(a, b)); }
double weighted_sq_sum(std::span<const double> v, std::span<const double> w) {
    FKDV_DISPATCH(weighted_sq_sum(v, w));
}
double max_abs(std::span<const double> x) { FKDV_DISPATCH(max_abs(x)); }
bool all_finite(std::span<const double> x) { FKDV_DISPATCH(all_finite(x)); }
void cmul(std::span<cplx> spec, std::span<const cplx> symbol) { FKDV_DISPATCH(cmul(spec, symbol)); }
void caxpy(std::span<cplx> y, cplx a, std::span<const cplx> x) { FKDV_DISPATCH(caxpy(y, a, x)); }
void etdrk4_combine(std::span<cplx> y, std::span<const cplx> e, std::span<const cplx> f1,
                    std::span<const cplx> f2, std::span<const cplx> f3,
                    std::span<const cplx> n1, std::span<const cplx> n2,
                    std::span<const cplx> n3, std::span<const cplx> n4) {
    FKDV_DISPATCH(etdrk4_combine(y, e, f1, f2, f3, n1, n2, n3, n4));
}

#undef FKDV_DISPATCH

} // namespace fkdv::kernels
