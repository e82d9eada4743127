#include "fkdv/spectral.hpp"

#include "fkdv/errors.hpp"
#include "fkdv/kernels.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace fkdv {

// ------------------------------------------------------------ transforms ---
//
// FFTW backs the raw DFTs. Plans are cached per grid size and executed with
// the new-array interface on fftw_malloc'd scratch (alignment compatible by
// construction); execution is thread-safe, plan creation is serialized.

namespace {

struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
    double* rbuf = nullptr;
    fftw_complex* cbuf = nullptr;
};

class PlanCache {
  public:
    const PlanPair& get(std::size_t n) {
        std::scoped_lock guard(lock_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        PlanPair p;
        p.rbuf = fftw_alloc_real(n);
        p.cbuf = fftw_alloc_complex(n / 2 + 1);
        p.r2c = fftw_plan_dft_r2c_1d(static_cast<int>(n), p.rbuf, p.cbuf, FFTW_ESTIMATE);
        p.c2r = fftw_plan_dft_c2r_1d(static_cast<int>(n), p.cbuf, p.rbuf, FFTW_ESTIMATE);
        return plans_.emplace(n, p).first->second;
    }

  private:
    std::mutex lock_;
    std::map<std::size_t, PlanPair> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

struct FftwBuffers {
    explicit FftwBuffers(std::size_t n)
        : r(fftw_alloc_real(n)), c(fftw_alloc_complex(n / 2 + 1)) {}
    ~FftwBuffers() {
        fftw_free(r);
        fftw_free(c);
    }
    FftwBuffers(const FftwBuffers&) = delete;
    FftwBuffers& operator=(const FftwBuffers&) = delete;
    double* r;
    fftw_complex* c;
};

} // namespace

namespace detail {

// Grid samples sit at x_j = -L + j h, so the DFT picks up a (-1)^k phase
// relative to coefficients of exp(i xi_k x).
std::vector<cplx> forward_transform(const Grid& g, std::span<const double> values) {
    const std::size_t n = g.size();
    const PlanPair& plan = plan_cache().get(n);
    FftwBuffers buf(n);
    for (std::size_t j = 0; j < n; ++j) buf.r[j] = values[j];
    fftw_execute_dft_r2c(plan.r2c, buf.r, buf.c);
    std::vector<cplx> spec(n / 2 + 1);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        spec[k] = sign * inv_n * cplx(buf.c[k][0], buf.c[k][1]);
    }
    return spec;
}

std::vector<double> inverse_transform(const Grid& g, std::span<const cplx> half_spectrum) {
    const std::size_t n = g.size();
    const PlanPair& plan = plan_cache().get(n);
    FftwBuffers buf(n);
    for (std::size_t k = 0; k < half_spectrum.size(); ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        buf.c[k][0] = sign * half_spectrum[k].real();
        buf.c[k][1] = sign * half_spectrum[k].imag();
    }
    fftw_execute_dft_c2r(plan.c2r, buf.c, buf.r);
    return std::vector<double>(buf.r, buf.r + n);
}

} // namespace detail

// --------------------------------------------------------------- symbols ---

MultiplierSymbol::MultiplierSymbol(GridPtr g, SymbolKind kind, std::vector<cplx> half)
    : grid_(std::move(g)), kind_(kind), half_(std::move(half)) {}

MultiplierSymbol MultiplierSymbol::riesz(GridPtr g, double s) {
    std::vector<cplx> half(g->spectrum_size());
    for (std::size_t k = 0; k < half.size(); ++k) {
        const double xi = g->xi(k);
        // |0|^0 is taken as 1 so that s = 0 is the identity.
        half[k] = (xi == 0.0 && s == 0.0) ? 1.0 : std::pow(std::abs(xi), s);
    }
    return MultiplierSymbol(std::move(g), SymbolKind::Riesz, std::move(half));
}

MultiplierSymbol MultiplierSymbol::hilbert(GridPtr g) {
    std::vector<cplx> half(g->spectrum_size(), cplx(0.0, -1.0));
    half.front() = 0.0;
    half.back() = 0.0; // unpaired Nyquist mode of an odd symbol
    return MultiplierSymbol(std::move(g), SymbolKind::Hilbert, std::move(half));
}

namespace {
// Exact powers of i; std::pow on complex drifts at the 1e-16 level.
cplx unit_i_pow(unsigned p) {
    switch (p % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}
} // namespace

MultiplierSymbol MultiplierSymbol::derivative(GridPtr g, unsigned order) {
    std::vector<cplx> half(g->spectrum_size());
    const cplx i_pow = unit_i_pow(order);
    for (std::size_t k = 0; k < half.size(); ++k)
        half[k] = i_pow * std::pow(g->xi(k), static_cast<double>(order));
    if (order % 2 == 1) half.back() = 0.0;
    return MultiplierSymbol(std::move(g), SymbolKind::Derivative, std::move(half));
}

MultiplierSymbol MultiplierSymbol::bessel(GridPtr g, double s) {
    std::vector<cplx> half(g->spectrum_size());
    for (std::size_t k = 0; k < half.size(); ++k) {
        const double xi = g->xi(k);
        half[k] = std::pow(1.0 + xi * xi, 0.5 * s);
    }
    return MultiplierSymbol(std::move(g), SymbolKind::Bessel, std::move(half));
}

MultiplierSymbol MultiplierSymbol::dispersion(GridPtr g, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw ConfigError("dispersion exponent must lie in (0,1), got " + std::to_string(alpha));
    std::vector<cplx> half(g->spectrum_size());
    for (std::size_t k = 0; k < half.size(); ++k) {
        const double xi = g->xi(k);
        half[k] = cplx(0.0, xi * std::pow(std::abs(xi), alpha));
    }
    half.back() = 0.0;
    return MultiplierSymbol(std::move(g), SymbolKind::Dispersion, std::move(half));
}

MultiplierSymbol MultiplierSymbol::mixed(GridPtr g, unsigned j, double s) {
    std::vector<cplx> half(g->spectrum_size());
    const cplx i_pow = unit_i_pow(j);
    for (std::size_t k = 0; k < half.size(); ++k) {
        const double xi = g->xi(k);
        const double riesz = (xi == 0.0 && s == 0.0) ? 1.0 : std::pow(std::abs(xi), s);
        const double deriv = (j == 0) ? 1.0 : std::pow(xi, static_cast<double>(j));
        half[k] = i_pow * deriv * riesz;
    }
    if (j % 2 == 1) half.back() = 0.0;
    return MultiplierSymbol(std::move(g), SymbolKind::Custom, std::move(half));
}

MultiplierSymbol MultiplierSymbol::custom(GridPtr g, const std::vector<cplx>& full_table) {
    if (full_table.size() != g->size())
        throw GridMismatchError("custom symbol table length does not match grid");
    const std::size_t n = g->size();
    for (std::size_t k = 1; k < n / 2; ++k) {
        const cplx diff = full_table[n - k] - std::conj(full_table[k]);
        if (std::abs(diff) > 1e-12 * (1.0 + std::abs(full_table[k])))
            throw ConfigError("custom multiplier is not Hermitian-symmetric; "
                              "it cannot map real fields to real fields");
    }
    if (std::abs(full_table[0].imag()) > 1e-14 || std::abs(full_table[n / 2].imag()) > 1e-14)
        throw ConfigError("custom multiplier must be real at the zero and Nyquist modes");
    std::vector<cplx> half(full_table.begin(), full_table.begin() + n / 2 + 1);
    return MultiplierSymbol(std::move(g), SymbolKind::Custom, std::move(half));
}

std::vector<cplx> MultiplierSymbol::full_table() const {
    const std::size_t n = grid_->size();
    std::vector<cplx> full(n);
    for (std::size_t k = 0; k <= n / 2; ++k) full[k] = half_[k];
    for (std::size_t k = n / 2 + 1; k < n; ++k) full[k] = std::conj(half_[n - k]);
    return full;
}

MultiplierSymbol MultiplierSymbol::composed_with(const MultiplierSymbol& other) const {
    if (!(*grid_ == other.grid()))
        throw GridMismatchError("cannot compose multipliers from different grids");
    std::vector<cplx> half(half_);
    for (std::size_t k = 0; k < half.size(); ++k) half[k] *= other.half_[k];
    return MultiplierSymbol(grid_, SymbolKind::Custom, std::move(half));
}

// ------------------------------------------------------------- operators ---

Field apply_multiplier(const Field& f, const MultiplierSymbol& m) {
    if (!(f.grid() == m.grid()))
        throw GridMismatchError("field and multiplier live on different grids");
    if (!f.finite()) throw FieldError("apply_multiplier: input field has non-finite samples");
    std::vector<cplx> spec(f.spectrum().begin(), f.spectrum().end());
    kernels::cmul(spec, m.half_samples());
    return Field(f.grid_ptr(), std::move(spec));
}

Field frac_deriv(const Field& f, double s) {
    if (s < 0.0) throw UnsupportedError("frac_deriv: negative Riesz exponent");
    return apply_multiplier(f, MultiplierSymbol::riesz(f.grid_ptr(), s));
}

Field hilbert(const Field& f) {
    return apply_multiplier(f, MultiplierSymbol::hilbert(f.grid_ptr()));
}

Field bessel(const Field& f, double s) {
    return apply_multiplier(f, MultiplierSymbol::bessel(f.grid_ptr(), s));
}

Field x_derivative(const Field& f, unsigned order) {
    return apply_multiplier(f, MultiplierSymbol::derivative(f.grid_ptr(), order));
}

Field mixed_deriv(const Field& f, unsigned j, double s) {
    if (s < 0.0) throw UnsupportedError("mixed_deriv: negative Riesz exponent");
    return apply_multiplier(f, MultiplierSymbol::mixed(f.grid_ptr(), j, s));
}

// ----------------------------------------------------------------- norms ---

namespace {
// Parseval weights: interior half-spectrum modes stand for a conjugate pair.
double pair_weight(const Grid& g, std::size_t k) {
    return (k == 0 || k == g.nyquist_index()) ? 1.0 : 2.0;
}
} // namespace

double sobolev_norm(const Field& f, double s) {
    if (!f.finite()) throw FieldError("sobolev_norm: non-finite field");
    const Grid& g = f.grid();
    auto spec = f.spectrum();
    double acc = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double xi = g.xi(k);
        acc += pair_weight(g, k) * std::pow(1.0 + xi * xi, s) * std::norm(spec[k]);
    }
    return std::sqrt(2.0 * g.half_length() * acc);
}

double lp_norm(const Field& f, double p) {
    if (!f.finite()) throw FieldError("lp_norm: non-finite field");
    const double h = f.grid().spacing();
    if (p == 1.0) return h * kernels::sum_abs(f.values());
    if (p == 2.0) return std::sqrt(h * kernels::sum_sq(f.values()));
    if (p == 0.0 || std::isinf(p)) return kernels::max_abs(f.values());
    throw UnsupportedError("lp_norm supports p in {1, 2, inf}");
}

double linf_norm(const Field& f) { return lp_norm(f, 0.0); }

double l2_norm_spectral(const Field& f) {
    const Grid& g = f.grid();
    auto spec = f.spectrum();
    double acc = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) acc += pair_weight(g, k) * std::norm(spec[k]);
    return std::sqrt(2.0 * g.half_length() * acc);
}

// ------------------------------------------------------------ projectors ---

Field truncate_modes(const Field& f, std::size_t keep_max) {
    std::vector<cplx> spec(f.spectrum().begin(), f.spectrum().end());
    for (std::size_t k = keep_max + 1; k < spec.size(); ++k) spec[k] = 0.0;
    return Field(f.grid_ptr(), std::move(spec));
}

Field bandpass_modes(const Field& f, std::size_t k_lo, std::size_t k_hi) {
    std::vector<cplx> spec(f.spectrum().begin(), f.spectrum().end());
    for (std::size_t k = 0; k < spec.size(); ++k)
        if (k < k_lo || k > k_hi) spec[k] = 0.0;
    return Field(f.grid_ptr(), std::move(spec));
}

double dealias_cutoff_index(const Grid& g) {
    return std::floor(static_cast<double>(g.size()) / 3.0);
}

double inner(const Field& f, const Field& g) {
    if (!(f.grid() == g.grid())) throw GridMismatchError("inner: grid mismatch");
    return f.grid().spacing() * kernels::dot(f.values(), g.values());
}

Field multiply_pointwise(const Field& f, std::span<const double> w) {
    if (w.size() != f.size()) throw GridMismatchError("multiply_pointwise: length mismatch");
    std::vector<double> out(f.size());
    kernels::multiply(out, f.values(), w);
    return f.with_values(std::move(out));
}

Field multiply_pointwise(const Field& f, const Field& g) {
    if (!(f.grid() == g.grid())) throw GridMismatchError("multiply_pointwise: grid mismatch");
    return multiply_pointwise(f, g.values());
}

} // namespace fkdv
