#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fkdv/commutators.hpp"
#include "fkdv/errors.hpp"
#include "fkdv/rng.hpp"
#include "fkdv/spectral.hpp"

#include <cmath>

using namespace fkdv;

namespace {

// Independent long-double evaluation of the coefficient product formula.
long double coefficient_oracle(long double a, unsigned j) {
    if (j == 0) return 1.0L;
    long double prod = 1.0L;
    for (unsigned k = 0; k < j; ++k) {
        const long double odd = 2.0L * k + 1.0L;
        prod *= a * a - odd * odd;
    }
    long double fact = 1.0L;
    for (unsigned k = 2; k <= 2 * j + 1; ++k) fact *= static_cast<long double>(k);
    return prod / fact;
}

OperatorWeight test_weight(GridPtr g, double eps = 0.5, double b = 2.5) {
    WeightFamily fam(WeightParams{eps, b});
    return periodic_ramp_weight(g, fam, 0.0);
}

} // namespace

TEST_CASE("expansion coefficients") {
    SUBCASE("pinned values") {
        CHECK(expansion_coefficient(1.7, 0) == 1.0);
        CHECK(expansion_coefficient(1.0, 1) == 0.0); // factor a^2 - 1 vanishes
        CHECK(expansion_coefficient(3.0, 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    }
    SUBCASE("a = 1 kills every higher coefficient exactly") {
        for (unsigned j = 1; j <= 6; ++j) CHECK(expansion_coefficient(1.0, j) == 0.0);
    }
    SUBCASE("matches the extended-precision oracle on a grid of exponents") {
        for (double a = 1.0; a <= 4.0 + 1e-9; a += 0.125) {
            for (unsigned j = 0; j <= 6; ++j) {
                const long double expect = coefficient_oracle(static_cast<long double>(a), j);
                const double got = expansion_coefficient(a, j);
                if (expect == 0.0L) {
                    CHECK(got == 0.0);
                } else {
                    CHECK(std::abs(static_cast<long double>(got) / expect - 1.0L) < 1e-14L);
                }
            }
        }
    }
    SUBCASE("odd integer a truncates the series") {
        // a = 2k0+1 zeroes c_{2j+1} for all j > k0
        for (unsigned j = 2; j <= 6; ++j) CHECK(expansion_coefficient(3.0, j) == 0.0);
        for (unsigned j = 3; j <= 6; ++j) CHECK(expansion_coefficient(5.0, j) == 0.0);
    }
}

TEST_CASE("admissible order selection") {
    SUBCASE("the paper's step choices") {
        const double alpha = 0.75;
        CHECK(admissible_order(alpha + 1.0, 2.0) == 2u);
        // m = 3 final step: sigma = m + 1 - alpha/2
        CHECK(admissible_order(alpha + 1.0, 3.0 + 1.0 - alpha / 2.0) == 3u);
    }
    SUBCASE("edge and tie cases") {
        CHECK(admissible_order(1.0, 0.0) == 0u);
        CHECK(admissible_order(3.0, 0.0) == 0u);  // a+2s = 3 ties 2n+3 at n=0
        CHECK(admissible_order(3.0, 1.0) == 1u);  // a+2s = 5 ties 2n+3 at n=1
        CHECK(admissible_order(0.5, 0.1) == std::nullopt);
    }
    SUBCASE("window membership for the returned order") {
        for (double a : {1.0, 1.3, 1.75, 2.5, 4.0}) {
            for (double s : {0.0, 0.4, 1.0, 2.4, 3.6}) {
                const auto n = admissible_order(a, s);
                REQUIRE(n.has_value());
                const double v = a + 2.0 * s;
                CHECK(2.0 * *n + 1.0 <= v + 1e-12);
                CHECK(v <= 2.0 * *n + 3.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("sandwich sum") {
    auto g = make_grid(1024, 30.0);
    auto rng = substream(7, "sandwich");

    SUBCASE("order zero with unit exponent is multiplication by a f'") {
        // f with constant derivative c on the support of u
        OperatorWeight lin = callable_weight(
            g, [](double x) { return 0.3 * x; }, {[](double) { return 0.3; }});
        CommutatorExpansion exp = make_expansion(1.0, 0, lin);
        Field u = random_band_limited(g, 64, rng);
        Field out = apply_sandwich_sum(exp, u);
        for (std::size_t i = 0; i < u.size(); ++i)
            CHECK(out.value(i) == doctest::Approx(0.3 * u.value(i)).epsilon(1e-12));
    }
    SUBCASE("vanishes where the weight is flat (mu = 0)") {
        OperatorWeight flat = constant_weight(g, 2.0);
        CommutatorExpansion exp = make_expansion(1.0, 0, flat);
        Field u = random_band_limited(g, 64, rng);
        Field out = apply_sandwich_sum(exp, u);
        CHECK(lp_norm(out, 2.0) == 0.0);
    }
    SUBCASE("linearity") {
        CommutatorExpansion exp = make_expansion(3.0, 1, test_weight(g));
        Field u = random_band_limited(g, 64, rng);
        Field w = random_band_limited(g, 64, rng);
        std::vector<double> sum(u.size());
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = u.value(i) + w.value(i);
        Field both = apply_sandwich_sum(exp, u.with_values(std::move(sum)));
        Field a = apply_sandwich_sum(exp, u);
        Field b = apply_sandwich_sum(exp, w);
        double err = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            err = std::max(err, std::abs(both.value(i) - a.value(i) - b.value(i)));
        CHECK(err < 1e-12 * linf_norm(both));
    }
    SUBCASE("discrete self-adjointness") {
        for (auto [a, n] : {std::pair{3.0, 1u}, std::pair{5.0, 2u}, std::pair{2.5, 0u}}) {
            CommutatorExpansion exp = make_expansion(a, n, test_weight(g));
            Field u = random_band_limited(g, 96, rng);
            Field w = random_band_limited(g, 96, rng);
            const double lhs = inner(apply_sandwich_sum(exp, u), w);
            const double rhs = inner(u, apply_sandwich_sum(exp, w));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
    }
    SUBCASE("negative inner exponents are rejected") {
        CommutatorExpansion exp = make_expansion(1.75, 2, test_weight(g));
        Field u = random_band_limited(g, 64, rng);
        CHECK_THROWS_AS(apply_sandwich_sum(exp, u), UnsupportedError);
    }
    SUBCASE("missing derivative stack is rejected at construction") {
        OperatorWeight shallow = constant_weight(g, 1.0, 2);
        CHECK_THROWS_AS(make_expansion(3.0, 1, shallow), ConfigError);
    }
}

TEST_CASE("dispersion bracket") {
    auto g = make_grid(2048, 30.0);
    auto rng = substream(8, "bracket");
    OperatorWeight f = test_weight(g);

    SUBCASE("commutator with a constant vanishes") {
        OperatorWeight one = constant_weight(g, 1.0);
        Field u = random_band_limited(g, 200, rng);
        Field out = apply_dispersion_bracket(one, 1.75, u);
        CHECK(lp_norm(out, 2.0) < 1e-13 * lp_norm(u, 2.0) + 1e-14);
    }
    SUBCASE("a = 1 reduces to multiplication by -f'") {
        auto gf = make_grid(8192, 30.0);
        OperatorWeight fw = test_weight(gf, 1.0, 5.0);
        Field u = random_band_limited(gf, 256, rng);
        Field out = apply_dispersion_bracket(fw, 1.0, u);
        double err = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            err = std::max(err, std::abs(out.value(i) + fw.derivs[0][i] * u.value(i)));
        CHECK(err < 1e-10);
    }
    SUBCASE("energy identity for the dispersive term") {
        // <dx^2 D^a' dx u, f dx^2 u> = (1/2) <dx^2 u, [H D^{a'+1}; f] dx^2 u>
        const double alpha = 0.75;
        Field u = random_band_limited(g, 150, rng);
        Field w = x_derivative(u, 2);
        Field lhs_op = mixed_deriv(x_derivative(u, 3), 0, alpha);
        const double lhs = inner(lhs_op, multiply_pointwise(w, f.value));
        Field br = apply_dispersion_bracket(f, alpha + 1.0, w);
        const double rhs = 0.5 * inner(w, br);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
    SUBCASE("grid mismatch") {
        auto g2 = make_grid(512, 30.0);
        Field u2 = random_band_limited(g2, 64, rng);
        CHECK_THROWS_AS(apply_dispersion_bracket(f, 1.5, u2), GridMismatchError);
    }
}

TEST_CASE("remainder operator") {
    auto g = make_grid(2048, 30.0);
    auto rng = substream(9, "remainder");
    OperatorWeight f = test_weight(g);

    SUBCASE("constant weight gives the zero operator") {
        OperatorWeight c = constant_weight(g, 3.7);
        CommutatorExpansion exp = make_expansion(1.5, 0, c);
        Field u = random_band_limited(g, 128, rng);
        Field out = apply_remainder(exp, u);
        CHECK(lp_norm(out, 2.0) < 1e-12 * lp_norm(u, 2.0) + 1e-14);
    }
    SUBCASE("zero field maps to zero") {
        CommutatorExpansion exp = make_expansion(1.5, 0, f);
        Field out = apply_remainder(exp, zero_field(g));
        CHECK(lp_norm(out, 2.0) == 0.0);
    }
    SUBCASE("closed form at a = 1, n = 0 over an ensemble") {
        // broad weight on a fine grid so the product f*u is spectrally resolved
        auto gf = make_grid(8192, 30.0);
        OperatorWeight fw = test_weight(gf, 1.0, 5.0);
        CommutatorExpansion exp = make_expansion(1.0, 0, fw);
        for (int trial = 0; trial < 50; ++trial) {
            Field u = random_band_limited(gf, 256, rng);
            Field out = apply_remainder(exp, u);
            // R_0(1) u = (f' u + H(f' H u)) / 2
            Field hu = hilbert(u);
            Field fhu = multiply_pointwise(hu, fw.derivs[0]);
            Field hfhu = hilbert(fhu);
            double err = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                const double expect = 0.5 * (fw.derivs[0][i] * u.value(i) + hfhu.value(i));
                err = std::max(err, std::abs(out.value(i) - expect));
            }
            CHECK(err < 1e-10);
        }
    }
    SUBCASE("linearity of the remainder at unit exponent") {
        CommutatorExpansion exp = make_expansion(1.0, 0, f);
        Field u = random_band_limited(g, 128, rng);
        Field w = random_band_limited(g, 128, rng);
        std::vector<double> sum(u.size());
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = u.value(i) + w.value(i);
        Field both = apply_remainder(exp, u.with_values(std::move(sum)));
        Field a = apply_remainder(exp, u);
        Field b = apply_remainder(exp, w);
        double err = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            err = std::max(err, std::abs(both.value(i) - a.value(i) - b.value(i)));
        CHECK(err < 1e-12);
    }
    SUBCASE("linearity at higher exponent, tolerance scaled to the bracket conditioning") {
        CommutatorExpansion exp = make_expansion(3.0, 1, f);
        Field u = random_band_limited(g, 128, rng);
        Field w = random_band_limited(g, 128, rng);
        std::vector<double> sum(u.size());
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = u.value(i) + w.value(i);
        Field both = apply_remainder(exp, u.with_values(std::move(sum)));
        Field a = apply_remainder(exp, u);
        Field b = apply_remainder(exp, w);
        double err = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            err = std::max(err, std::abs(both.value(i) - a.value(i) - b.value(i)));
        // intermediates carry |xi|^a before cancellation
        const double cond = std::pow(g->max_wavenumber(), 3.0);
        CHECK(err < 100.0 * 2.2e-16 * cond);
    }
    SUBCASE("fused smoothed remainder agrees with explicit composition when defined") {
        CommutatorExpansion exp = make_expansion(3.0, 1, f);
        const double sigma = 0.5;
        Field u = random_band_limited(g, 128, rng);
        Field fused = apply_smoothed_remainder(exp, sigma, u);
        Field explicit_path = frac_deriv(apply_remainder(exp, frac_deriv(u, sigma)), sigma);
        double err = 0.0, scale = linf_norm(explicit_path);
        for (std::size_t i = 0; i < u.size(); ++i)
            err = std::max(err, std::abs(fused.value(i) - explicit_path.value(i)));
        CHECK(err < 1e-10 * std::max(1.0, scale));
    }
    SUBCASE("fused remainder needs mu + sigma >= n") {
        CommutatorExpansion exp = make_expansion(1.75, 2, f);
        Field u = random_band_limited(g, 64, rng);
        CHECK_THROWS_AS(apply_smoothed_remainder(exp, 0.0, u), UnsupportedError);
    }
}

TEST_CASE("remainder bound ensemble checks") {
    auto g = make_grid(1024, 30.0);

    SUBCASE("unit constant regime: a >= 2n+1") {
        struct Case { double a; unsigned n; double sigma; };
        for (const Case c : {Case{1.0, 0, 0.0}, Case{1.75, 0, 0.0}, Case{3.0, 0, 0.0},
                             Case{3.0, 1, 0.0}, Case{3.0, 1, 1.0}, Case{5.0, 2, 0.0}}) {
            CAPTURE(c.a);
            CAPTURE(c.n);
            CAPTURE(c.sigma);
            CommutatorExpansion exp = make_expansion(c.a, c.n, test_weight(g, 0.1, 1.0));
            BoundCheckSpec spec;
            spec.sigma = c.sigma;
            spec.ensemble_size = 30;
            const auto report = check_remainder_bound(exp, spec);
            CHECK(report.unit_constant_applies);
            REQUIRE(report.pass.has_value());
            CHECK(*report.pass);
            CHECK(report.max_ratio <= 1.05);
            CHECK(report.max_ratio > 0.0);
        }
    }
    SUBCASE("dispersive-regime triples are recorded without pass/fail") {
        for (double alpha : {0.3, 0.5, 0.75}) {
            const double a = alpha + 1.0;
            struct Case { unsigned n; double sigma; };
            std::vector<Case> cases = {{2, 2.0}, {2, 2.0 + alpha / 2.0}};
            for (int m : {2, 3})
                cases.push_back({static_cast<unsigned>(m),
                                 static_cast<double>(m) + 1.0 - alpha / 2.0});
            for (const auto& c : cases) {
                CAPTURE(alpha);
                CAPTURE(c.n);
                CAPTURE(c.sigma);
                CommutatorExpansion exp =
                    make_expansion(a, c.n, test_weight(g, 0.1, 1.0));
                BoundCheckSpec spec;
                spec.sigma = c.sigma;
                spec.ensemble_size = 20;
                const auto report = check_remainder_bound(exp, spec);
                CHECK_FALSE(report.unit_constant_applies);
                CHECK_FALSE(report.pass.has_value());
                CHECK(std::isfinite(report.max_ratio));
                CHECK(report.rhs_constant > 0.0);
            }
        }
    }
    SUBCASE("inadmissible triples are rejected") {
        CommutatorExpansion exp = make_expansion(1.0, 0, test_weight(g, 0.1, 1.0));
        BoundCheckSpec spec;
        spec.sigma = 2.0; // a + 2 sigma = 5 > 3
        CHECK_THROWS_AS(check_remainder_bound(exp, spec), ConfigError);
    }
}

TEST_CASE("inequality probes") {
    auto g = make_grid(1024, 30.0);
    ProbeParams params;
    params.ensemble_size = 15;

    SUBCASE("all kinds produce finite positive constants") {
        for (ProbeKind kind :
             {ProbeKind::Calderon, ProbeKind::Leibniz, ProbeKind::KatoPonceA,
              ProbeKind::GagliardoNirenberg, ProbeKind::DisjointSupport}) {
            CAPTURE(probe_kind_name(kind));
            const auto report = inequality_probe(kind, g, params);
            CHECK(report.samples > 0);
            CHECK(std::isfinite(report.best_constant));
            CHECK(report.best_constant > 0.0);
        }
        ProbeParams kp_b = params;
        kp_b.s = 1.4;
        const auto report = inequality_probe(ProbeKind::KatoPonceB, g, kp_b);
        CHECK(std::isfinite(report.best_constant));
    }
    SUBCASE("gagliardo-nirenberg with p = 2 is exactly Hoelder") {
        const auto report = inequality_probe(ProbeKind::GagliardoNirenberg, g, params);
        CHECK(report.best_constant <= 1.0 + 1e-10);
    }
    SUBCASE("disjoint supports tame the high derivative") {
        ProbeParams p = params;
        p.m = 2;
        p.s = 0.7;
        const auto report = inequality_probe(ProbeKind::DisjointSupport, g, p);
        // the composition spreads only through the operator tail across the gap
        CHECK(report.best_constant < 1.0);
    }
    SUBCASE("unsupported norms are rejected") {
        ProbeParams p = params;
        p.p = 4.0;
        CHECK_THROWS_AS(inequality_probe(ProbeKind::Leibniz, g, p), UnsupportedError);
    }
    SUBCASE("probe names round-trip") {
        for (ProbeKind kind :
             {ProbeKind::Calderon, ProbeKind::Leibniz, ProbeKind::KatoPonceA,
              ProbeKind::KatoPonceB, ProbeKind::GagliardoNirenberg, ProbeKind::DisjointSupport})
            CHECK(probe_kind_from_name(probe_kind_name(kind)) == kind);
        CHECK_THROWS_AS(probe_kind_from_name("unknown"), LookupError);
    }
}
