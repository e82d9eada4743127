#include "fkdv/commutators.hpp"

#include "fkdv/errors.hpp"
#include "fkdv/kernels.hpp"
#include "fkdv/mollifier.hpp"
#include "fkdv/rng.hpp"
#include "fkdv/spectral.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace fkdv {

double expansion_coefficient(double a, unsigned j) {
    if (j == 0) return 1.0;
    double prod = 1.0;
    double factorial = 1.0;
    for (unsigned k = 0; k < j; ++k) {
        const double odd = 2.0 * static_cast<double>(k) + 1.0;
        prod *= a * a - odd * odd;
    }
    for (unsigned k = 2; k <= 2 * j + 1; ++k) factorial *= static_cast<double>(k);
    return prod / factorial;
}

std::optional<unsigned> admissible_order(double a, double sigma) {
    const double v = a + 2.0 * sigma;
    if (v < 1.0) return std::nullopt;
    // smallest n with v <= 2n+3, so exact ties v = 2n+3 land on the smaller n
    const double raw = std::ceil((v - 3.0) / 2.0);
    return static_cast<unsigned>(std::max(0.0, raw));
}

CommutatorExpansion make_expansion(double a, unsigned order, OperatorWeight weight) {
    if (!(a >= 1.0)) throw ConfigError("commutator expansion requires a >= 1");
    if (weight.max_order() < 2 * order + 1) {
        std::ostringstream os;
        os << "expansion of order " << order << " needs weight derivatives up to " << 2 * order + 1
           << ", weight carries " << weight.max_order();
        throw ConfigError(os.str());
    }
    CommutatorExpansion exp;
    exp.a = a;
    exp.mu = 0.5 * (a - 1.0);
    exp.order = order;
    exp.coeffs.resize(order + 1);
    for (unsigned j = 0; j <= order; ++j) exp.coeffs[j] = expansion_coefficient(a, j);
    exp.weight = std::move(weight);
    return exp;
}

namespace {

void require_same_grid(const OperatorWeight& w, const Field& u, const char* what) {
    if (!(*w.grid == u.grid()))
        throw GridMismatchError(std::string(what) + ": weight and field grids differ");
}

// D^{s_out} ( f_deriv .* D^{s_in} u ), one sandwich term with fused exponents.
Field sandwich_term(const Field& u, std::span<const double> f_deriv, double s_in, double s_out) {
    Field inner_d = frac_deriv(u, s_in);
    Field prod = multiply_pointwise(inner_d, f_deriv);
    return frac_deriv(prod, s_out);
}

// Same with Hilbert transforms hugging the weight: (H D^{s_out})(f .* (D^{s_in} H u)).
Field sandwich_term_hilbert(const Field& u, std::span<const double> f_deriv, double s_in,
                            double s_out) {
    GridPtr g = u.grid_ptr();
    const MultiplierSymbol inner_sym =
        MultiplierSymbol::riesz(g, s_in).composed_with(MultiplierSymbol::hilbert(g));
    const MultiplierSymbol outer_sym =
        MultiplierSymbol::hilbert(g).composed_with(MultiplierSymbol::riesz(g, s_out));
    Field inner_d = apply_multiplier(u, inner_sym);
    Field prod = multiply_pointwise(inner_d, f_deriv);
    return apply_multiplier(prod, outer_sym);
}

double term_coefficient(const CommutatorExpansion& exp, unsigned j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    return exp.a * exp.coeffs[j] * sign * std::pow(4.0, -static_cast<double>(j));
}

} // namespace

Field apply_sandwich_sum(const CommutatorExpansion& exp, const Field& u) {
    require_same_grid(exp.weight, u, "apply_sandwich_sum");
    if (exp.mu < static_cast<double>(exp.order) - 1e-12) {
        std::ostringstream os;
        os << "sandwich sum needs mu >= n (mu = " << exp.mu << ", n = " << exp.order
           << "); negative Riesz exponents are not supported";
        throw UnsupportedError(os.str());
    }
    std::vector<double> acc(u.size(), 0.0);
    for (unsigned j = 0; j <= exp.order; ++j) {
        const double s = exp.mu - static_cast<double>(j);
        Field term = sandwich_term(u, exp.weight.derivative(2 * j + 1), s, s);
        kernels::add_scaled(acc, term_coefficient(exp, j), term.values());
    }
    return u.with_values(std::move(acc));
}

Field apply_dispersion_bracket(const OperatorWeight& f, double a, const Field& u) {
    require_same_grid(f, u, "apply_dispersion_bracket");
    if (!(a >= 1.0)) throw ConfigError("dispersion bracket requires a >= 1");
    GridPtr g = u.grid_ptr();
    const MultiplierSymbol hda =
        MultiplierSymbol::hilbert(g).composed_with(MultiplierSymbol::riesz(g, a));
    Field lhs = apply_multiplier(multiply_pointwise(u, f.value), hda);
    Field rhs = multiply_pointwise(apply_multiplier(u, hda), f.value);
    std::vector<double> out(lhs.values().begin(), lhs.values().end());
    kernels::add_scaled(out, -1.0, rhs.values());
    return u.with_values(std::move(out));
}

Field apply_remainder(const CommutatorExpansion& exp, const Field& u) {
    Field bracket = apply_dispersion_bracket(exp.weight, exp.a, u);
    Field pu = apply_sandwich_sum(exp, u);
    Field hph = hilbert(apply_sandwich_sum(exp, hilbert(u)));
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = -bracket.value(i) - 0.5 * (pu.value(i) - hph.value(i));
    return u.with_values(std::move(out));
}

Field apply_smoothed_remainder(const CommutatorExpansion& exp, double sigma, const Field& u) {
    require_same_grid(exp.weight, u, "apply_smoothed_remainder");
    if (sigma < 0.0) throw ConfigError("smoothing exponent sigma must be >= 0");
    if (exp.mu + sigma < static_cast<double>(exp.order) - 1e-12) {
        std::ostringstream os;
        os << "smoothed remainder needs mu + sigma >= n (mu = " << exp.mu
           << ", sigma = " << sigma << ", n = " << exp.order << ")";
        throw UnsupportedError(os.str());
    }
    GridPtr g = u.grid_ptr();

    // Bracket part: D^s [H D^a; f] D^s u with the outer/inner Riesz powers
    // folded into single multipliers.
    const MultiplierSymbol hda_s =
        MultiplierSymbol::hilbert(g).composed_with(MultiplierSymbol::riesz(g, exp.a + sigma));
    Field v = frac_deriv(u, sigma);
    Field b1 = apply_multiplier(multiply_pointwise(v, exp.weight.value), hda_s);
    Field b2 = frac_deriv(multiply_pointwise(apply_multiplier(u, hda_s), exp.weight.value), sigma);

    std::vector<double> acc(u.size(), 0.0);
    kernels::add_scaled(acc, -1.0, b1.values());
    kernels::add_scaled(acc, 1.0, b2.values());

    // Sandwich parts, exponents fused with sigma on both sides.
    for (unsigned j = 0; j <= exp.order; ++j) {
        const double s = exp.mu - static_cast<double>(j) + sigma;
        const double coef = -0.5 * term_coefficient(exp, j);
        Field plain = sandwich_term(u, exp.weight.derivative(2 * j + 1), s, s);
        Field conj = sandwich_term_hilbert(u, exp.weight.derivative(2 * j + 1), s, s);
        kernels::add_scaled(acc, coef, plain.values());
        kernels::add_scaled(acc, -coef, conj.values());
    }
    return u.with_values(std::move(acc));
}

RemainderBoundReport check_remainder_bound(const CommutatorExpansion& exp,
                                           const BoundCheckSpec& spec) {
    const double window = exp.a + 2.0 * spec.sigma;
    const double lo = 2.0 * exp.order + 1.0;
    const double hi = 2.0 * exp.order + 3.0;
    if (window < lo - 1e-12 || window > hi + 1e-12) {
        std::ostringstream os;
        os << "inadmissible (n, a, sigma): need 2n+1 <= a+2sigma <= 2n+3, got a+2sigma = "
           << window << " for n = " << exp.order;
        throw ConfigError(os.str());
    }

    GridPtr g = exp.weight.grid;
    Field fw(g, std::vector<double>(exp.weight.value));
    auto spec_f = fw.spectrum();

    // Discrete surrogate of the transform's L1 mass: sum over the full
    // wavenumber set of |xi|^{a+2s} |f_hat(xi)| times the spacing pi/L, with
    // f_hat(xi_k) = 2L c_k.
    double l1 = 0.0;
    for (std::size_t k = 0; k < spec_f.size(); ++k) {
        const double w = (k == 0 || k + 1 == spec_f.size()) ? 1.0 : 2.0;
        l1 += w * std::pow(std::abs(g->xi(k)), window) * std::abs(spec_f[k]);
    }
    l1 *= 2.0 * M_PI;

    RemainderBoundReport report;
    report.a = exp.a;
    report.order = exp.order;
    report.sigma = spec.sigma;
    report.rhs_constant = l1 / std::sqrt(2.0 * M_PI);
    report.unit_constant_applies = exp.a >= 2.0 * exp.order + 1.0 - 1e-12;

    const std::size_t band = spec.band_limit ? spec.band_limit : g->size() / 4;
    auto rng = substream(spec.seed, "remainder-bound");
    double max_ratio = 0.0;
    for (std::size_t i = 0; i < spec.ensemble_size; ++i) {
        Field u = random_band_limited(g, band, rng);
        Field r = apply_smoothed_remainder(exp, spec.sigma, u);
        const double num = lp_norm(r, 2.0);
        const double den = report.rhs_constant * lp_norm(u, 2.0);
        if (den > 0.0) max_ratio = std::max(max_ratio, num / den);
    }
    report.samples = spec.ensemble_size;
    report.max_ratio = max_ratio;
    if (report.unit_constant_applies) report.pass = max_ratio <= spec.pass_slack;
    return report;
}

// ------------------------------------------------------ inequality probes ---

ProbeKind probe_kind_from_name(std::string_view name) {
    if (name == "calderon") return ProbeKind::Calderon;
    if (name == "leibniz") return ProbeKind::Leibniz;
    if (name == "kato-ponce-a") return ProbeKind::KatoPonceA;
    if (name == "kato-ponce-b") return ProbeKind::KatoPonceB;
    if (name == "gagliardo-nirenberg") return ProbeKind::GagliardoNirenberg;
    if (name == "disjoint-support") return ProbeKind::DisjointSupport;
    throw LookupError("unknown inequality probe: " + std::string(name));
}

std::string probe_kind_name(ProbeKind k) {
    switch (k) {
        case ProbeKind::Calderon: return "calderon";
        case ProbeKind::Leibniz: return "leibniz";
        case ProbeKind::KatoPonceA: return "kato-ponce-a";
        case ProbeKind::KatoPonceB: return "kato-ponce-b";
        case ProbeKind::GagliardoNirenberg: return "gagliardo-nirenberg";
        case ProbeKind::DisjointSupport: return "disjoint-support";
    }
    return "?";
}

namespace {

double probe_norm(const Field& f, double p) {
    if (p == 2.0) return lp_norm(f, 2.0);
    if (p == 0.0 || std::isinf(p)) return linf_norm(f);
    throw UnsupportedError("inequality probes support p in {2, inf} only");
}

// Smooth compactly supported window centered at c with radius r.
std::vector<double> bump_window(const Grid& g, double c, double r) {
    Mollifier m(1.0);
    const double peak = m.value(0.0);
    std::vector<double> w(g.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = m.value((g.point(i) - c) / r) / peak;
    return w;
}

} // namespace

ProbeReport inequality_probe(ProbeKind kind, GridPtr grid, const ProbeParams& params) {
    if (!(params.p == 2.0 || params.p == 0.0 || std::isinf(params.p)))
        throw UnsupportedError("inequality probes support p in {2, inf} only");
    const std::size_t band = params.band_limit ? params.band_limit : grid->size() / 6;
    auto rng = substream(params.seed, "probe-" + probe_kind_name(kind));

    ProbeReport report;
    report.kind = kind;
    double sum_ratio = 0.0;
    std::size_t counted = 0;

    for (std::size_t i = 0; i < params.ensemble_size; ++i) {
        Field f = random_smooth(grid, band, rng);
        Field gfield = random_smooth(grid, band, rng);
        double lhs = 0.0, rhs = 0.0;
        switch (kind) {
            case ProbeKind::Calderon: {
                // psi: fixed broad Gaussian envelope (smooth and periodic to
                // machine precision for L >> width)
                std::vector<double> psi(grid->size());
                for (std::size_t jj = 0; jj < psi.size(); ++jj) {
                    const double x = grid->point(jj);
                    psi[jj] = std::exp(-x * x / 9.0);
                }
                Field psi_f(grid, std::vector<double>(psi));
                Field gmf = x_derivative(f, params.m);
                Field comm_arg = multiply_pointwise(gmf, psi);
                Field comm = hilbert(comm_arg);
                Field tail = multiply_pointwise(hilbert(gmf), psi);
                std::vector<double> d(comm.values().begin(), comm.values().end());
                kernels::add_scaled(d, -1.0, tail.values());
                Field bracket = f.with_values(std::move(d));
                lhs = probe_norm(x_derivative(bracket, params.l), params.p);
                rhs = linf_norm(x_derivative(psi_f, params.m + params.l)) * probe_norm(f, params.p);
                break;
            }
            case ProbeKind::Leibniz: {
                Field fg = multiply_pointwise(f, gfield);
                lhs = probe_norm(frac_deriv(fg, params.s), params.p);
                rhs = linf_norm(f) * probe_norm(frac_deriv(gfield, params.s), params.p) +
                      linf_norm(gfield) * probe_norm(frac_deriv(f, params.s), params.p);
                break;
            }
            case ProbeKind::KatoPonceA:
            case ProbeKind::KatoPonceB: {
                if (kind == ProbeKind::KatoPonceA && !(params.s > 0.0 && params.s <= 1.0))
                    throw ConfigError("kato-ponce-a needs 0 < s <= 1");
                if (kind == ProbeKind::KatoPonceB && !(params.s > 1.0))
                    throw ConfigError("kato-ponce-b needs s > 1");
                Field fg = multiply_pointwise(f, gfield);
                Field comm = frac_deriv(fg, params.s);
                Field tail = multiply_pointwise(frac_deriv(gfield, params.s), f.values());
                std::vector<double> d(comm.values().begin(), comm.values().end());
                kernels::add_scaled(d, -1.0, tail.values());
                lhs = probe_norm(f.with_values(std::move(d)), params.p);
                // D^{s-1} d/dx f = -H D^s f
                Field ds1 = hilbert(frac_deriv(f, params.s));
                rhs = linf_norm(ds1) * probe_norm(gfield, params.p);
                if (kind == ProbeKind::KatoPonceB)
                    rhs += linf_norm(x_derivative(f, 1)) *
                           probe_norm(frac_deriv(gfield, params.s - 1.0), params.p);
                break;
            }
            case ProbeKind::GagliardoNirenberg: {
                const double al = params.gn_alpha, be = params.gn_beta;
                if (!(0.0 < al && al < be))
                    throw ConfigError("gagliardo-nirenberg needs 0 < alpha < beta");
                double theta;
                if (params.p == 2.0) {
                    theta = al / be;
                } else {
                    // p = inf, r = q = 2: -alpha = 1/2 - theta beta
                    theta = (al + 0.5) / be;
                    if (theta > 1.0)
                        throw ConfigError("gagliardo-nirenberg with p = inf needs beta >= alpha + 1/2");
                }
                lhs = probe_norm(frac_deriv(f, al), params.p);
                rhs = std::pow(lp_norm(f, 2.0), 1.0 - theta) *
                      std::pow(lp_norm(frac_deriv(f, be), 2.0), theta);
                break;
            }
            case ProbeKind::DisjointSupport: {
                const double gap = params.delta;
                const double r = 0.5;
                // supports [cf-r, cf+r] and [cg-r, cg+r], exactly `gap` apart
                const double cf = -0.5 * gap - r;
                const double cg = -cf;
                Field floc = multiply_pointwise(f, bump_window(*grid, cf, r));
                Field gloc = multiply_pointwise(gfield, bump_window(*grid, cg, r));
                Field dsf = mixed_deriv(floc, params.m, params.s);
                lhs = probe_norm(multiply_pointwise(gloc, dsf.values()), params.p);
                rhs = probe_norm(gloc, params.p) * lp_norm(floc, 2.0);
                break;
            }
        }
        if (rhs > 0.0) {
            const double ratio = lhs / rhs;
            report.best_constant = std::max(report.best_constant, ratio);
            sum_ratio += ratio;
            ++counted;
        }
    }
    report.samples = counted;
    report.mean_ratio = counted ? sum_ratio / static_cast<double>(counted) : 0.0;
    return report;
}

} // namespace fkdv
