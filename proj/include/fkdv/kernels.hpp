#pragma once

// Data-parallel primitives behind the spectral operators, the time stepper and
// the quadrature loops. Every kernel exists twice: a plain serial loop
// (reference implementation, used to validate the parallel one) and an OpenMP
// version. The dispatching wrappers route through the process-wide execution
// policy; tests pin the policy explicitly.

#include <complex>
#include <cstddef>
#include <span>

namespace fkdv::kernels {

using cplx = std::complex<double>;

enum class Exec { Serial, Parallel };

Exec execution() noexcept;
void set_execution(Exec e) noexcept;

namespace serial {
void fill(std::span<double> x, double a);
void scale(std::span<double> x, double a);
void add_scaled(std::span<double> y, double a, std::span<const double> x); // y += a*x
void multiply(std::span<double> out, std::span<const double> a, std::span<const double> b);
void square(std::span<double> out, std::span<const double> a);
double sum(std::span<const double> x);
double sum_abs(std::span<const double> x);
double sum_sq(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
double weighted_sq_sum(std::span<const double> v, std::span<const double> w); // sum v^2 w
double max_abs(std::span<const double> x);
bool all_finite(std::span<const double> x);
void cmul(std::span<cplx> spec, std::span<const cplx> symbol); // spec *= symbol
void caxpy(std::span<cplx> y, cplx a, std::span<const cplx> x);
// y = e.*y + a*f1.*(n1) + b*f2.*(n2+n3) + c*f3.*(n4)   (ETDRK4 combine stage)
void etdrk4_combine(std::span<cplx> y, std::span<const cplx> e, std::span<const cplx> f1,
                    std::span<const cplx> f2, std::span<const cplx> f3,
                    std::span<const cplx> n1, std::span<const cplx> n2,
                    std::span<const cplx> n3, std::span<const cplx> n4);
} // namespace serial

namespace omp {
void fill(std::span<double> x, double a);
void scale(std::span<double> x, double a);
void add_scaled(std::span<double> y, double a, std::span<const double> x);
void multiply(std::span<double> out, std::span<const double> a, std::span<const double> b);
void square(std::span<double> out, std::span<const double> a);
double sum(std::span<const double> x);
double sum_abs(std::span<const double> x);
double sum_sq(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
double weighted_sq_sum(std::span<const double> v, std::span<const double> w);
double max_abs(std::span<const double> x);
bool all_finite(std::span<const double> x);
void cmul(std::span<cplx> spec, std::span<const cplx> symbol);
void caxpy(std::span<cplx> y, cplx a, std::span<const cplx> x);
void etdrk4_combine(std::span<cplx> y, std::span<const cplx> e, std::span<const cplx> f1,
                    std::span<const cplx> f2, std::span<const cplx> f3,
                    std::span<const cplx> n1, std::span<const cplx> n2,
                    std::span<const cplx> n3, std::span<const cplx> n4);
} // namespace omp

// Policy-dispatched entry points.
void fill(std::span<double> x, double a);
void scale(std::span<double> x, double a);
void add_scaled(std::span<double> y, double a, std::span<const double> x);
void multiply(std::span<double> out, std::span<const double> a, std::span<const double> b);
void square(std::span<double> out, std::span<const double> a);
double sum(std::span<const double> x);
double sum_abs(std::span<const double> x);
double sum_sq(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
double weighted_sq_sum(std::span<const double> v, std::span<const double> w);
double max_abs(std::span<const double> x);
bool all_finite(std::span<const double> x);
void cmul(std::span<cplx> spec, std::span<const cplx> symbol);
void caxpy(std::span<cplx> y, cplx a, std::span<const cplx> x);
void etdrk4_combine(std::span<cplx> y, std::span<const cplx> e, std::span<const cplx> f1,
                    std::span<const cplx> f2, std::span<const cplx> f3,
                    std::span<const cplx> n1, std::span<const cplx> n2,
                    std::span<const cplx> n3, std::span<const cplx> n4);

} // namespace fkdv::kernels
