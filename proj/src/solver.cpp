#include "fkdv/solver.hpp"

#include "fkdv/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace fkdv {

MultiplierSymbol linear_symbol(GridPtr g, double alpha) {
    return MultiplierSymbol::dispersion(std::move(g), alpha);
}

namespace {

bool spectrum_finite(const std::vector<cplx>& spec) {
    const double* raw = reinterpret_cast<const double*>(spec.data());
    return kernels::all_finite(std::span<const double>(raw, 2 * spec.size()));
}

// -(u^2/2)_x in spectral space; top third zeroed when dealiasing.
std::vector<cplx> nonlinear_spectrum(const Grid& g, const std::vector<cplx>& spec, bool dealias) {
    std::vector<double> u = detail::inverse_transform(g, spec);
    std::vector<double> sq(u.size());
    kernels::square(sq, u);
    std::vector<cplx> out = detail::forward_transform(g, sq);
    const std::size_t cutoff = dealias ? static_cast<std::size_t>(dealias_cutoff_index(g))
                                       : g.size(); // no truncation
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (k > cutoff) {
            out[k] = 0.0;
        } else {
            out[k] *= cplx(0.0, -0.5 * g.xi(k));
        }
    }
    out.back() = 0.0; // odd multiplier: unpaired Nyquist mode carries no derivative
    return out;
}

} // namespace

Field nonlinear_term(const Field& u, bool dealias) {
    if (!u.finite()) throw FieldError("nonlinear_term: non-finite field");
    std::vector<cplx> spec(u.spectrum().begin(), u.spectrum().end());
    return Field(u.grid_ptr(), nonlinear_spectrum(u.grid(), spec, dealias));
}

ConservedQuantities conserved(const Field& u, double alpha) {
    const Grid& g = u.grid();
    auto spec = u.spectrum();
    ConservedQuantities q;
    q.mass = 2.0 * g.half_length() * spec[0].real();
    q.l2 = g.spacing() * kernels::sum_sq(u.values());
    // quadratic part of H by Parseval, cubic part by grid quadrature
    double quad = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double w = (k == 0 || k + 1 == spec.size()) ? 1.0 : 2.0;
        quad += w * std::pow(std::abs(g.xi(k)), alpha) * std::norm(spec[k]);
    }
    quad *= g.half_length(); // = (1/2) * 2L * sum
    double cubic = 0.0;
    for (double v : u.values()) cubic += v * v * v;
    cubic *= g.spacing() / 6.0;
    q.hamiltonian = quad - cubic;
    return q;
}

// ------------------------------------------------------------ TimeStepper ---

struct TimeStepper::Impl {
    GridPtr grid;
    SolverConfig config;
    // ETDRK4 tables
    std::vector<cplx> E, E2, Q, f1, f2, f3, Einv;
    // IMEX2 (Crank-Nicolson + Adams-Bashforth) tables
    std::vector<cplx> cn_num, cn_den_inv;
    mutable std::vector<cplx> prev_nonlinear; // AB2 history
    mutable bool have_history = false;
};

namespace {

constexpr std::size_t kContourPoints = 32;

// Mean of f over the unit circle centered at z: equals f(z) for analytic f
// with spectral accuracy, and never divides by a small |z|.
template <typename F>
cplx contour_mean(cplx z, F&& f) {
    cplx acc = 0.0;
    for (std::size_t m = 0; m < kContourPoints; ++m) {
        const double th = 2.0 * M_PI * (static_cast<double>(m) + 0.5) /
                          static_cast<double>(kContourPoints);
        acc += f(z + std::polar(1.0, th));
    }
    return acc / static_cast<double>(kContourPoints);
}

} // namespace

TimeStepper::TimeStepper(GridPtr grid, const SolverConfig& config) : impl_(new Impl) {
    impl_->grid = grid;
    impl_->config = config;
    if (!(config.dt > 0.0)) throw ConfigError("time step must be positive");
    const MultiplierSymbol disp = linear_symbol(grid, config.alpha);
    const auto lam = disp.half_samples();
    const double h = config.dt;
    const std::size_t ns = grid->spectrum_size();

    if (config.scheme == Scheme::Etdrk4) {
        auto& I = *impl_;
        I.E.resize(ns);
        I.E2.resize(ns);
        I.Q.resize(ns);
        I.f1.resize(ns);
        I.f2.resize(ns);
        I.f3.resize(ns);
        I.Einv.resize(ns);
        for (std::size_t k = 0; k < ns; ++k) {
            const cplx z = h * lam[k];
            I.E[k] = std::exp(z);
            I.Einv[k] = std::exp(-z);
            I.E2[k] = std::exp(0.5 * z);
            I.Q[k] = h * contour_mean(z, [](cplx w) { return (std::exp(0.5 * w) - 1.0) / w; });
            I.f1[k] = h * contour_mean(z, [](cplx w) {
                return (-4.0 - w + std::exp(w) * (4.0 - 3.0 * w + w * w)) / (w * w * w);
            });
            I.f2[k] = h * contour_mean(z, [](cplx w) {
                return (2.0 + w + std::exp(w) * (-2.0 + w)) / (w * w * w);
            });
            I.f3[k] = h * contour_mean(z, [](cplx w) {
                return (-4.0 - 3.0 * w - w * w + std::exp(w) * (4.0 - w)) / (w * w * w);
            });
        }
    } else {
        auto& I = *impl_;
        I.cn_num.resize(ns);
        I.cn_den_inv.resize(ns);
        I.Einv.resize(ns);
        for (std::size_t k = 0; k < ns; ++k) {
            const cplx z = h * lam[k];
            I.cn_num[k] = 1.0 + 0.5 * z;
            I.cn_den_inv[k] = 1.0 / (1.0 - 0.5 * z);
            I.Einv[k] = std::exp(-z);
        }
    }
}

TimeStepper::~TimeStepper() = default;

const SolverConfig& TimeStepper::config() const { return impl_->config; }

void TimeStepper::advance(std::vector<cplx>& v) const {
    const auto& I = *impl_;
    const Grid& g = *I.grid;
    const bool nl = !I.config.linear_only;
    const bool da = I.config.dealias;
    const double h = I.config.dt;

    if (I.config.scheme == Scheme::Etdrk4) {
        std::vector<cplx> Nu = nl ? nonlinear_spectrum(g, v, da) : std::vector<cplx>(v.size());
        std::vector<cplx> a(v.size()), b(v.size()), c(v.size());
        for (std::size_t k = 0; k < v.size(); ++k) a[k] = I.E2[k] * v[k] + I.Q[k] * Nu[k];
        std::vector<cplx> Na = nl ? nonlinear_spectrum(g, a, da) : std::vector<cplx>(v.size());
        for (std::size_t k = 0; k < v.size(); ++k) b[k] = I.E2[k] * v[k] + I.Q[k] * Na[k];
        std::vector<cplx> Nb = nl ? nonlinear_spectrum(g, b, da) : std::vector<cplx>(v.size());
        for (std::size_t k = 0; k < v.size(); ++k)
            c[k] = I.E2[k] * a[k] + I.Q[k] * (2.0 * Nb[k] - Nu[k]);
        std::vector<cplx> Nc = nl ? nonlinear_spectrum(g, c, da) : std::vector<cplx>(v.size());
        kernels::etdrk4_combine(v, I.E, I.f1, I.f2, I.f3, Nu, Na, Nb, Nc);
    } else {
        std::vector<cplx> Nu = nl ? nonlinear_spectrum(g, v, da) : std::vector<cplx>(v.size());
        if (!I.have_history) {
            // Crank-Nicolson / explicit Euler bootstrap
            for (std::size_t k = 0; k < v.size(); ++k)
                v[k] = (I.cn_num[k] * v[k] + h * Nu[k]) * I.cn_den_inv[k];
        } else {
            for (std::size_t k = 0; k < v.size(); ++k)
                v[k] = (I.cn_num[k] * v[k] + h * (1.5 * Nu[k] - 0.5 * I.prev_nonlinear[k])) *
                       I.cn_den_inv[k];
        }
        I.prev_nonlinear = std::move(Nu);
        I.have_history = true;
    }
    if (!spectrum_finite(v)) throw BlowUpError("time step produced non-finite values", 0.0);
}

void TimeStepper::advance_linear_backward(std::vector<cplx>& v) const {
    kernels::cmul(v, impl_->Einv);
}

SolverState step(const SolverState& state, const SolverConfig& config) {
    if (!state.u.finite()) throw FieldError("step: state is non-finite");
    TimeStepper stepper(state.u.grid_ptr(), config);
    std::vector<cplx> spec(state.u.spectrum().begin(), state.u.spectrum().end());
    try {
        stepper.advance(spec);
    } catch (const BlowUpError&) {
        std::ostringstream os;
        os << "blow-up detected during step starting at t = " << state.t;
        throw SolverBlowUp(os.str(), state.t, state);
    }
    SolverState next = state;
    next.u = Field(state.u.grid_ptr(), std::move(spec));
    next.t = state.t + config.dt;
    next.step_count = state.step_count + 1;
    return next;
}

namespace {

double boundary_fraction(const Field& u, double margin = 5.0) {
    const Grid& g = u.grid();
    double near = 0.0, total = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double v = u.value(j) * u.value(j);
        total += v;
        if (std::abs(g.point(j)) > g.half_length() - margin) near += v;
    }
    return total > 0.0 ? near / total : 0.0;
}

double grad_sup(const Grid& g, const std::vector<cplx>& spec) {
    std::vector<cplx> d(spec);
    for (std::size_t k = 0; k < d.size(); ++k) d[k] *= cplx(0.0, g.xi(k));
    d.back() = 0.0;
    std::vector<double> phys = detail::inverse_transform(g, d);
    return kernels::max_abs(phys);
}

} // namespace

SolverState resume_run(SolverState state, const SolverConfig& config,
                       const std::vector<Observer>& observers) {
    if (!state.u.finite()) throw FieldError("run: initial data is non-finite");
    if (!(config.t_final >= 0.0)) throw ConfigError("t_final must be nonnegative");

    GridPtr grid = state.u.grid_ptr();
    // Absolute step schedule from t = 0: n_full uniform steps, plus one
    // shorter step when dt does not divide t_final. Times are computed as
    // s * dt from the absolute index, so a resumed run reproduces an
    // uninterrupted one bit for bit.
    const double steps_exact = config.t_final / config.dt;
    std::size_t n_full = static_cast<std::size_t>(std::floor(steps_exact + 1e-9));
    double remainder = config.t_final - static_cast<double>(n_full) * config.dt;
    if (remainder < 1e-12 * std::max(1.0, config.t_final)) remainder = 0.0;
    const std::size_t n_total = n_full + (remainder > 0.0 ? 1 : 0);
    if (state.step_count >= n_total) return state;

    TimeStepper stepper(grid, config);
    std::vector<cplx> spec(state.u.spectrum().begin(), state.u.spectrum().end());
    if (config.dealias) {
        const auto cutoff = static_cast<std::size_t>(dealias_cutoff_index(*grid));
        for (std::size_t k = cutoff + 1; k < spec.size(); ++k) spec[k] = 0.0;
        state.u = Field(grid, std::vector<cplx>(spec));
    }

    const std::size_t cadence = std::max<std::size_t>(1, config.output_cadence);
    const std::size_t stride = std::max<std::size_t>(1, n_total / cadence);
    auto is_output_step = [&](std::size_t s) { return s == n_total || (s % stride) == 0; };

    auto emit = [&](SolverState& st) {
        const ConservedQuantities q = conserved(st.u, config.alpha);
        st.conserved_log.push_back({st.t, q.mass, q.l2, q.hamiltonian, st.strichartz_accum});
        const double frac = boundary_fraction(st.u);
        st.max_boundary_fraction = std::max(st.max_boundary_fraction, frac);
        if (frac > config.contamination_threshold) st.contamination_warning = true;
        for (const auto& obs : observers) obs(st);
    };

    emit(state);
    double prev_grad = grad_sup(*grid, spec);
    const auto cutoff = static_cast<std::size_t>(dealias_cutoff_index(*grid));

    for (std::size_t s = state.step_count + 1; s <= n_total; ++s) {
        const bool partial = (s == n_total && remainder > 0.0);
        try {
            if (partial) {
                SolverConfig last = config;
                last.dt = remainder;
                TimeStepper final_stepper(grid, last);
                final_stepper.advance(spec);
            } else {
                stepper.advance(spec);
            }
        } catch (const BlowUpError&) {
            const double t_fail = partial ? config.t_final : static_cast<double>(s) * config.dt;
            std::ostringstream os;
            os << "solver blow-up at t = " << t_fail << " (step " << s << ")";
            throw SolverBlowUp(os.str(), t_fail, state);
        }
        // The physical samples are the canonical state after every step, and
        // the working spectrum is re-derived from them. A snapshot taken at
        // any step boundary therefore resumes the identical float trajectory
        // no matter how the output schedules of the two runs differ.
        std::vector<double> values = detail::inverse_transform(*grid, spec);
        spec = detail::forward_transform(*grid, values);
        if (config.dealias)
            for (std::size_t k = cutoff + 1; k < spec.size(); ++k) spec[k] = 0.0;

        const double t_now = partial ? config.t_final : static_cast<double>(s) * config.dt;
        const double grad = grad_sup(*grid, spec);
        state.strichartz_accum += 0.5 * (t_now - state.t) * (prev_grad + grad);
        prev_grad = grad;
        state.t = t_now;
        state.step_count = s;
        if (is_output_step(s)) {
            state.u = Field(grid, std::move(values));
            emit(state);
        }
    }
    return state;
}

SolverState run(const Field& initial, const SolverConfig& config,
                const std::vector<Observer>& observers) {
    SolverState start{0.0, initial, 0, {}, 0.0, 0.0, false};
    return resume_run(std::move(start), config, observers);
}

} // namespace fkdv
