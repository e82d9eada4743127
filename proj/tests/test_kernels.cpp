#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fkdv/kernels.hpp"

#include <random>
#include <vector>

using namespace fkdv;
using kernels::cplx;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = g(rng);
    return v;
}

std::vector<cplx> random_cvec(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cplx> v(n);
    for (auto& x : v) x = cplx(g(rng), g(rng));
    return v;
}

} // namespace

TEST_CASE("serial and parallel kernels agree") {
    std::mt19937_64 rng(7);
    for (std::size_t n : {0ul, 1ul, 7ul, 64ul, 1023ul, 4096ul}) {
        auto a = random_vec(n, rng);
        auto b = random_vec(n, rng);

        // pointwise ops run the same FP operations per element: exact match
        auto y1 = a;
        auto y2 = a;
        kernels::serial::add_scaled(y1, 0.37, b);
        kernels::omp::add_scaled(y2, 0.37, b);
        CHECK(y1 == y2);

        std::vector<double> m1(n), m2(n);
        kernels::serial::multiply(m1, a, b);
        kernels::omp::multiply(m2, a, b);
        CHECK(m1 == m2);

        // reductions may reassociate: compare to a relative tolerance
        const double s1 = kernels::serial::sum_sq(a);
        const double s2 = kernels::omp::sum_sq(a);
        CHECK(s1 == doctest::Approx(s2).epsilon(1e-13));

        const double d1 = kernels::serial::dot(a, b);
        const double d2 = kernels::omp::dot(a, b);
        CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));

        const double w1 = kernels::serial::weighted_sq_sum(a, b);
        const double w2 = kernels::omp::weighted_sq_sum(a, b);
        CHECK(w1 == doctest::Approx(w2).epsilon(1e-12));

        CHECK(kernels::serial::max_abs(a) == kernels::omp::max_abs(a));
        CHECK(kernels::serial::sum_abs(a) == doctest::Approx(kernels::omp::sum_abs(a)).epsilon(1e-13));
        CHECK(kernels::serial::all_finite(a) == kernels::omp::all_finite(a));
    }
}

TEST_CASE("complex kernels agree across policies") {
    std::mt19937_64 rng(11);
    for (std::size_t n : {1ul, 33ul, 2049ul}) {
        auto spec = random_cvec(n, rng);
        auto sym = random_cvec(n, rng);
        auto s1 = spec;
        auto s2 = spec;
        kernels::serial::cmul(s1, sym);
        kernels::omp::cmul(s2, sym);
        CHECK(s1 == s2);

        auto e = random_cvec(n, rng);
        auto f1 = random_cvec(n, rng);
        auto f2 = random_cvec(n, rng);
        auto f3 = random_cvec(n, rng);
        auto n1 = random_cvec(n, rng);
        auto n2 = random_cvec(n, rng);
        auto n3 = random_cvec(n, rng);
        auto n4 = random_cvec(n, rng);
        auto y1 = spec;
        auto y2 = spec;
        kernels::serial::etdrk4_combine(y1, e, f1, f2, f3, n1, n2, n3, n4);
        kernels::omp::etdrk4_combine(y2, e, f1, f2, f3, n1, n2, n3, n4);
        CHECK(y1 == y2);
    }
}

TEST_CASE("nan detection") {
    std::vector<double> v{1.0, 2.0, std::nan(""), 3.0};
    CHECK_FALSE(kernels::serial::all_finite(v));
    CHECK_FALSE(kernels::omp::all_finite(v));
    v[2] = 0.0;
    CHECK(kernels::serial::all_finite(v));
    CHECK(kernels::omp::all_finite(v));
}

TEST_CASE("execution policy dispatch") {
    const auto saved = kernels::execution();
    kernels::set_execution(kernels::Exec::Serial);
    CHECK(kernels::execution() == kernels::Exec::Serial);
    std::vector<double> v{1.0, 2.0, 3.0};
    CHECK(kernels::sum(v) == doctest::Approx(6.0));
    kernels::set_execution(kernels::Exec::Parallel);
    CHECK(kernels::sum(v) == doctest::Approx(6.0));
    kernels::set_execution(saved);
}
