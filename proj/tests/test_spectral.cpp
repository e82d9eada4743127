#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fkdv/errors.hpp"
#include "fkdv/rng.hpp"
#include "fkdv/spectral.hpp"

#include "oracle_utils.hpp"

#include <cmath>

using namespace fkdv;

TEST_CASE("grid construction and wavenumber table") {
    auto g = make_grid(8, M_PI);
    CHECK(g->spacing() == doctest::Approx(M_PI / 4.0));
    // xi_k = k on an L = pi box; FFT order 0,1,2,3,4,-3,-2,-1
    const std::vector<double> expected{0, 1, 2, 3, 4, -3, -2, -1};
    for (std::size_t k = 0; k < 8; ++k)
        CHECK(g->wavenumbers()[k] == doctest::Approx(expected[k]).epsilon(1e-15));
    CHECK(g->spacing() * static_cast<double>(g->size()) ==
          doctest::Approx(2.0 * g->half_length()));

    auto g2 = make_grid(16, 10.0);
    CHECK(g2->xi(1) == doctest::Approx(M_PI / 10.0));

    CHECK_THROWS_AS(make_grid(7, M_PI), ConfigError);
    CHECK_THROWS_AS(make_grid(6, M_PI), ConfigError);
    CHECK_THROWS_AS(make_grid(64, 0.0), ConfigError);
    CHECK_THROWS_AS(make_grid(64, -1.0), ConfigError);
}

TEST_CASE("round-trip transform on random fields across grid sizes") {
    auto rng = substream(42, "round-trip");
    for (std::size_t n : {64ul, 128ul, 512ul, 768ul, 2048ul, 8192ul}) {
        auto g = make_grid(n, 15.0);
        Field f = random_band_limited(g, n / 3, rng);
        Field back(g, std::vector<cplx>(f.spectrum().begin(), f.spectrum().end()));
        double max_err = 0.0, scale = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            max_err = std::max(max_err, std::abs(back.value(j) - f.value(j)));
            scale = std::max(scale, std::abs(f.value(j)));
        }
        CHECK(max_err < 1e-12 * scale);
    }
}

TEST_CASE("forward transform matches brute-force DFT") {
    auto rng = substream(43, "dft-oracle");
    auto g = make_grid(64, 7.0);
    Field f = random_band_limited(g, 20, rng);
    auto brute = oracle::brute_force_coefficients(*g, f.values());
    auto fast = f.spectrum();
    for (std::size_t k = 0; k < brute.size(); ++k)
        CHECK(std::abs(fast[k] - brute[k]) < 1e-12);
}

TEST_CASE("multiplier eigenvalue actions on pure modes") {
    auto g = make_grid(256, M_PI);
    Field s3 = sample_field(g, [](double x) { return std::sin(3.0 * x); });

    SUBCASE("riesz 0.5 on sin(3x)") {
        Field out = frac_deriv(s3, 0.5);
        const double lam = std::sqrt(3.0);
        for (std::size_t j = 0; j < out.size(); ++j)
            CHECK(std::abs(out.value(j) - lam * s3.value(j)) < 1e-12);
    }
    SUBCASE("hilbert maps cos(kx) to sin(kx)") {
        Field c5 = sample_field(g, [](double x) { return std::cos(5.0 * x); });
        Field out = hilbert(c5);
        for (std::size_t j = 0; j < out.size(); ++j)
            CHECK(std::abs(out.value(j) - std::sin(5.0 * g->point(j))) < 1e-12);
    }
    SUBCASE("riesz 0 is the identity, zero mode included") {
        Field shifted = sample_field(g, [](double x) { return 2.5 + std::sin(x); });
        Field out = frac_deriv(shifted, 0.0);
        for (std::size_t j = 0; j < out.size(); ++j)
            CHECK(out.value(j) == doctest::Approx(shifted.value(j)).epsilon(1e-14));
    }
    SUBCASE("frac_deriv scales sin(kx) by k^s") {
        Field out = frac_deriv(s3, 1.3);
        const double lam = std::pow(3.0, 1.3);
        for (std::size_t j = 0; j < out.size(); ++j)
            CHECK(std::abs(out.value(j) - lam * s3.value(j)) < 1e-11);
    }
    SUBCASE("hilbert twice negates mean-zero fields") {
        Field out = hilbert(hilbert(s3));
        for (std::size_t j = 0; j < out.size(); ++j)
            CHECK(std::abs(out.value(j) + s3.value(j)) < 1e-12);
    }
    SUBCASE("bessel fixes constants") {
        Field c = sample_field(g, [](double) { return 4.25; });
        Field out = bessel(c, 1.7);
        for (std::size_t j = 0; j < out.size(); ++j)
            CHECK(out.value(j) == doctest::Approx(4.25).epsilon(1e-14));
    }
}

TEST_CASE("multiplier symbol invariants") {
    auto g = make_grid(64, 5.0);
    SUBCASE("riesz is real, even, zero at origin for s > 0") {
        auto full = MultiplierSymbol::riesz(g, 0.8).full_table();
        CHECK(full[0] == cplx(0.0, 0.0));
        for (std::size_t k = 1; k < 32; ++k) {
            CHECK(full[k].imag() == 0.0);
            CHECK(full[k] == full[64 - k]);
        }
    }
    SUBCASE("hilbert vanishes at zero and Nyquist") {
        const auto sym = MultiplierSymbol::hilbert(g);
        auto half = sym.half_samples();
        CHECK(half[0] == cplx(0.0, 0.0));
        CHECK(half[32] == cplx(0.0, 0.0));
        CHECK(half[5] == cplx(0.0, -1.0));
    }
    SUBCASE("bessel is 1 at the origin") {
        const auto sym = MultiplierSymbol::bessel(g, 2.3);
        CHECK(sym.half_samples()[0] == cplx(1.0, 0.0));
    }
    SUBCASE("dispersion is imaginary, odd, Nyquist-zeroed") {
        auto full = MultiplierSymbol::dispersion(g, 0.75).full_table();
        CHECK(full[0] == cplx(0.0, 0.0));
        CHECK(full[32] == cplx(0.0, 0.0));
        for (std::size_t k = 1; k < 32; ++k) {
            CHECK(full[k].real() == 0.0);
            CHECK(full[64 - k] == -full[k]);
            CHECK(std::abs(full[k]) ==
                  doctest::Approx(std::pow(std::abs(g->xi(k)), 1.75)).epsilon(1e-14));
        }
        CHECK_THROWS_AS(MultiplierSymbol::dispersion(g, 1.5), ConfigError);
    }
    SUBCASE("non-Hermitian custom tables are rejected") {
        std::vector<cplx> table(64, cplx(0.0, 1.0));
        CHECK_THROWS_AS(MultiplierSymbol::custom(g, table), ConfigError);
    }
}

TEST_CASE("operator algebra properties") {
    auto rng = substream(44, "algebra");
    auto g = make_grid(512, 12.0);
    Field f = random_band_limited(g, 128, rng);

    SUBCASE("fractional powers compose additively") {
        for (double s1 : {0.0, 0.4, 1.5, 3.0}) {
            for (double s2 : {0.3, 2.2}) {
                Field a = frac_deriv(frac_deriv(f, s1), s2);
                Field b = frac_deriv(f, s1 + s2);
                double err = 0.0, scale = 0.0;
                for (std::size_t j = 0; j < a.size(); ++j) {
                    err = std::max(err, std::abs(a.value(j) - b.value(j)));
                    scale = std::max(scale, std::abs(b.value(j)));
                }
                CHECK(err < 1e-12 * scale);
            }
        }
    }
    SUBCASE("riesz and hilbert commute exactly in spectrum") {
        Field a = hilbert(frac_deriv(f, 0.9));
        Field b = frac_deriv(hilbert(f), 0.9);
        auto sa = a.spectrum();
        auto sb = b.spectrum();
        for (std::size_t k = 0; k < sa.size(); ++k) CHECK(sa[k] == sb[k]);
    }
    SUBCASE("hilbert is an L2 isometry on mean-zero fields") {
        const double before = lp_norm(f, 2.0);
        const double after = lp_norm(hilbert(f), 2.0);
        CHECK(after == doctest::Approx(before).epsilon(1e-12));
    }
    SUBCASE("parseval identity") {
        const double phys = lp_norm(f, 2.0);
        const double spec = l2_norm_spectral(f);
        CHECK(phys * phys == doctest::Approx(spec * spec).epsilon(1e-10));
    }
}

TEST_CASE("norms") {
    SUBCASE("zero field") {
        auto g = make_grid(64, 3.0);
        CHECK(sobolev_norm(zero_field(g), 1.7) == 0.0);
    }
    SUBCASE("L2 of sin on the unit-pi box") {
        auto g = make_grid(256, M_PI);
        Field s = sample_field(g, [](double x) { return std::sin(x); });
        CHECK(lp_norm(s, 2.0) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
    }
    SUBCASE("gaussian Sobolev norm against the dense-quadrature oracle") {
        auto g = make_grid(1024, 20.0);
        Field gauss = sample_field(g, [](double x) { return std::exp(-x * x / 2.0); });
        const double expected = oracle::gaussian_sobolev_norm(1.5);
        CHECK(sobolev_norm(gauss, 1.5) == doctest::Approx(expected).epsilon(1e-6));
    }
    SUBCASE("unsupported p") {
        auto g = make_grid(64, 1.0);
        CHECK_THROWS_AS(lp_norm(zero_field(g), 3.0), UnsupportedError);
    }
}

TEST_CASE("error paths") {
    auto g1 = make_grid(64, 5.0);
    auto g2 = make_grid(128, 5.0);
    Field f1 = zero_field(g1);
    auto m2 = MultiplierSymbol::hilbert(g2);
    CHECK_THROWS_AS(apply_multiplier(f1, m2), GridMismatchError);

    std::vector<double> bad(64, 0.0);
    bad[10] = std::nan("");
    Field fbad(g1, std::move(bad));
    CHECK_THROWS_AS(apply_multiplier(fbad, MultiplierSymbol::hilbert(g1)), FieldError);
    CHECK_THROWS_AS(lp_norm(fbad, 2.0), FieldError);
}

TEST_CASE("mode projectors") {
    auto rng = substream(45, "projectors");
    auto g = make_grid(256, 8.0);
    Field f = random_band_limited(g, 100, rng);
    Field cut = truncate_modes(f, 40);
    auto spec = cut.spectrum();
    for (std::size_t k = 41; k < spec.size(); ++k) CHECK(std::abs(spec[k]) == 0.0);
    Field band = bandpass_modes(f, 10, 20);
    auto bspec = band.spectrum();
    CHECK(std::abs(bspec[9]) == 0.0);
    CHECK(std::abs(bspec[21]) == 0.0);
    CHECK(std::abs(bspec[15]) == std::abs(f.spectrum()[15]));
}
