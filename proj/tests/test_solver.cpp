#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fkdv/errors.hpp"
#include "fkdv/rng.hpp"
#include "fkdv/solver.hpp"

#include <cmath>

using namespace fkdv;

namespace {

Field gaussian_data(GridPtr g, double amp = 1.0, double width = 3.0, double center = 0.0) {
    return sample_field(g, [=](double x) {
        return amp * std::exp(-std::pow((x - center) / width, 2));
    });
}

double l2_diff(const Field& a, const Field& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.value(i) - b.value(i);
        acc += d * d;
    }
    return std::sqrt(a.grid().spacing() * acc);
}

} // namespace

TEST_CASE("dispersion symbol guards") {
    auto g = make_grid(256, 10.0);
    CHECK_THROWS_AS(linear_symbol(g, 0.0), ConfigError);
    CHECK_THROWS_AS(linear_symbol(g, 1.0), ConfigError);
    const auto sym = linear_symbol(g, 0.5);
    CHECK(sym.half_samples()[0] == cplx(0.0, 0.0));
    CHECK(std::abs(sym.half_samples()[3]) ==
          doctest::Approx(std::pow(g->xi(3), 1.5)).epsilon(1e-14));
}

TEST_CASE("nonlinear term") {
    auto g = make_grid(512, M_PI);
    SUBCASE("constants are stationary for the nonlinearity") {
        Field c = sample_field(g, [](double) { return 2.3; });
        Field out = nonlinear_term(c, true);
        CHECK(linf_norm(out) < 1e-14);
    }
    SUBCASE("sin(x) maps to -sin(2x)/2") {
        Field s = sample_field(g, [](double x) { return std::sin(x); });
        Field out = nonlinear_term(s, true);
        double err = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i)
            err = std::max(err, std::abs(out.value(i) + 0.5 * std::sin(2.0 * g->point(i))));
        CHECK(err < 1e-12);
    }
    SUBCASE("dealiasing touches only the top third of the spectrum") {
        auto rng = substream(3, "dealias");
        Field u = random_band_limited(g, 200, rng);
        Field with = nonlinear_term(u, true);
        Field without = nonlinear_term(u, false);
        auto sw = with.spectrum();
        auto so = without.spectrum();
        const std::size_t cutoff = static_cast<std::size_t>(dealias_cutoff_index(*g));
        for (std::size_t k = 0; k <= cutoff; ++k) CHECK(std::abs(sw[k] - so[k]) == 0.0);
        bool differs = false;
        for (std::size_t k = cutoff + 1; k < sw.size(); ++k)
            if (std::abs(sw[k] - so[k]) > 0.0) differs = true;
        CHECK(differs);
    }
}

TEST_CASE("conserved quantities") {
    SUBCASE("zero field") {
        auto g = make_grid(128, 5.0);
        const auto q = conserved(zero_field(g), 0.6);
        CHECK(q.mass == 0.0);
        CHECK(q.l2 == 0.0);
        CHECK(q.hamiltonian == 0.0);
    }
    SUBCASE("sine on the pi box") {
        auto g = make_grid(512, M_PI);
        Field s = sample_field(g, [](double x) { return std::sin(x); });
        const auto q = conserved(s, 0.75);
        CHECK(std::abs(q.mass) < 1e-14);
        CHECK(q.l2 == doctest::Approx(M_PI).epsilon(1e-13));
        // cubic part vanishes by symmetry; quadratic part is |1|^0.75 * pi/2... 
        // H = (1/2) int sin D^a sin = (1/2) * 1^a * pi
        CHECK(q.hamiltonian == doctest::Approx(0.5 * M_PI).epsilon(1e-12));
    }
}

TEST_CASE("single steps") {
    auto g = make_grid(256, 20.0);
    SolverConfig cfg;
    cfg.alpha = 0.75;
    cfg.dt = 1e-2;
    SUBCASE("zero field is a fixed point") {
        SolverState st{0.0, zero_field(g), 0, {}, 0.0, 0.0, false};
        SolverState next = step(st, cfg);
        CHECK(linf_norm(next.u) == 0.0);
        CHECK(next.step_count == 1);
        CHECK(next.t == doctest::Approx(cfg.dt));
    }
    SUBCASE("constants are fixed points") {
        Field c = sample_field(g, [](double) { return 1.7; });
        SolverState st{0.0, c, 0, {}, 0.0, 0.0, false};
        SolverState next = step(st, cfg);
        double err = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i)
            err = std::max(err, std::abs(next.u.value(i) - 1.7));
        CHECK(err < 1e-13);
    }
}

TEST_CASE("etdrk4 self-convergence") {
    auto g = make_grid(512, 30.0);
    Field u0 = gaussian_data(g);
    const double T = 0.5;
    auto run_with_dt = [&](double dt) {
        SolverConfig cfg;
        cfg.alpha = 0.75;
        cfg.dt = dt;
        cfg.t_final = T;
        cfg.output_cadence = 1;
        return run(u0, cfg).u;
    };
    Field ref = run_with_dt(T / 800.0);
    Field coarse = run_with_dt(T / 100.0);
    Field fine = run_with_dt(T / 200.0);
    const double e_coarse = l2_diff(coarse, ref);
    const double e_fine = l2_diff(fine, ref);
    const double ratio = e_coarse / e_fine;
    // fourth order: halving dt cuts the error 16x (25% slack per the contract)
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
    const double order = std::log2(ratio);
    CHECK(order > 3.5);
    CHECK(order < 4.5);
}

TEST_CASE("imex2 self-convergence is second order") {
    auto g = make_grid(512, 30.0);
    Field u0 = gaussian_data(g);
    const double T = 0.5;
    auto run_with_dt = [&](double dt) {
        SolverConfig cfg;
        cfg.alpha = 0.75;
        cfg.dt = dt;
        cfg.t_final = T;
        cfg.scheme = Scheme::Imex2;
        cfg.output_cadence = 1;
        return run(u0, cfg).u;
    };
    Field ref = run_with_dt(T / 3200.0);
    Field coarse = run_with_dt(T / 200.0);
    Field fine = run_with_dt(T / 400.0);
    const double order = std::log2(l2_diff(coarse, ref) / l2_diff(fine, ref));
    CHECK(order > 1.6);
    CHECK(order < 2.4);
}

TEST_CASE("conservation on a short smooth run") {
    auto g = make_grid(1024, 30.0);
    Field u0 = gaussian_data(g);
    SolverConfig cfg;
    cfg.alpha = 0.75;
    cfg.dt = 1e-3;
    cfg.t_final = 1.0;
    cfg.output_cadence = 10;
    SolverState st = run(u0, cfg);
    REQUIRE(st.conserved_log.size() >= 3);
    const auto& first = st.conserved_log.front();
    const auto& last = st.conserved_log.back();
    CHECK(std::abs(last.mass - first.mass) <= 1e-12 * std::max(1.0, std::abs(first.mass)));
    CHECK(std::abs(last.l2 - first.l2) <= 1e-6 * first.l2);
    CHECK(std::abs(last.hamiltonian - first.hamiltonian) <=
          1e-5 * std::max(1.0, std::abs(first.hamiltonian)));
    // strictly increasing sample times, accumulator nondecreasing
    for (std::size_t i = 1; i < st.conserved_log.size(); ++i) {
        CHECK(st.conserved_log[i].t > st.conserved_log[i - 1].t);
        CHECK(st.conserved_log[i].strichartz_accum >=
              st.conserved_log[i - 1].strichartz_accum);
    }
}

TEST_CASE("linear flow is unitary and reversible") {
    auto g = make_grid(512, 20.0);
    auto rng = substream(5, "linear-flow");
    Field u0 = random_band_limited(g, 128, rng);
    SolverConfig cfg;
    cfg.alpha = 0.5;
    cfg.dt = 1e-2;
    cfg.t_final = 0.5;
    cfg.linear_only = true;
    cfg.output_cadence = 1;

    SUBCASE("modulus of every mode is preserved") {
        SolverState st = run(u0, cfg);
        auto s0 = u0.spectrum();
        auto s1 = st.u.spectrum();
        for (std::size_t k = 0; k < s0.size(); ++k)
            CHECK(std::abs(s1[k]) == doctest::Approx(std::abs(s0[k])).epsilon(1e-12));
        CHECK(lp_norm(st.u, 2.0) == doctest::Approx(lp_norm(u0, 2.0)).epsilon(1e-12));
    }
    SUBCASE("backward linear steps undo forward ones") {
        TimeStepper stepper(g, cfg);
        std::vector<cplx> spec(u0.spectrum().begin(), u0.spectrum().end());
        for (int i = 0; i < 10; ++i) stepper.advance(spec);
        for (int i = 0; i < 10; ++i) stepper.advance_linear_backward(spec);
        Field back(g, std::move(spec));
        double err = 0.0;
        for (std::size_t i = 0; i < u0.size(); ++i)
            err = std::max(err, std::abs(back.value(i) - u0.value(i)));
        CHECK(err < 1e-11);
    }
}

TEST_CASE("spatial spectral convergence") {
    const double L = 30.0;
    auto g1 = make_grid(512, L);
    auto g2 = make_grid(1024, L);
    SolverConfig cfg;
    cfg.alpha = 0.75;
    cfg.dt = 1e-3;
    cfg.t_final = 1.0;
    cfg.output_cadence = 1;
    SolverState c1 = run(gaussian_data(g1), cfg);
    SolverState c2 = run(gaussian_data(g2), cfg);
    // coarse grid points are the even fine grid points
    double err = 0.0;
    for (std::size_t j = 0; j < g1->size(); ++j)
        err = std::max(err, std::abs(c1.u.value(j) - c2.u.value(2 * j)));
    CHECK(err < 1e-9);
}

TEST_CASE("T = 0 returns the initial state with an empty log") {
    auto g = make_grid(256, 10.0);
    Field u0 = gaussian_data(g);
    SolverConfig cfg;
    cfg.t_final = 0.0;
    SolverState st = run(u0, cfg);
    CHECK(st.step_count == 0);
    CHECK(st.conserved_log.empty());
    CHECK(l2_diff(st.u, u0) == 0.0);
}

TEST_CASE("blow-up raises with the partial state attached") {
    auto g = make_grid(256, 10.0);
    Field huge = sample_field(g, [](double x) { return 1e200 * std::sin(x); });
    SolverConfig cfg;
    cfg.alpha = 0.75;
    cfg.dt = 0.1;
    cfg.t_final = 1.0;
    bool threw = false;
    try {
        run(huge, cfg);
    } catch (const SolverBlowUp& e) {
        threw = true;
        CHECK(e.t > 0.0);
        CHECK(std::string(e.what()).find("blow-up") != std::string::npos);
        CHECK(e.partial.conserved_log.size() >= 1);
    }
    CHECK(threw);
}

TEST_CASE("boundary contamination is flagged") {
    auto g = make_grid(512, 20.0);
    SolverConfig cfg;
    cfg.alpha = 0.75;
    cfg.dt = 1e-3;
    cfg.t_final = 0.01;
    cfg.contamination_threshold = 1e-6;
    // mass parked against the right boundary
    SolverState st = run(gaussian_data(g, 1.0, 2.0, 18.0), cfg);
    CHECK(st.contamination_warning);
    CHECK(st.max_boundary_fraction > 1e-3);
    // centered data stays clean
    SolverState ok = run(gaussian_data(g, 1.0, 2.0, 0.0), cfg);
    CHECK_FALSE(ok.contamination_warning);
}
