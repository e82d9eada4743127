#include "fkdv/weights.hpp"

#include "fkdv/errors.hpp"
#include "fkdv/kernels.hpp"
#include "fkdv/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

namespace fkdv {

namespace {

constexpr double kRadicandFloor = -1e-14;

void validate(const WeightParams& p) {
    if (!(p.epsilon > 0.0)) throw ConfigError("weight family requires epsilon > 0");
    if (p.b < 5.0 * p.epsilon) {
        std::ostringstream os;
        os << "weight family requires b >= 5*epsilon (got b = " << p.b
           << ", 5*epsilon = " << 5.0 * p.epsilon << ")";
        throw ConfigError(os.str());
    }
}

double clamped_sqrt(double radicand) {
    if (radicand <= 0.0) return 0.0;
    return std::sqrt(radicand);
}

} // namespace

WeightMember weight_member_from_name(std::string_view name) {
    if (name == "chi") return WeightMember::Chi;
    if (name == "phi") return WeightMember::Phi;
    if (name == "phi_tilde") return WeightMember::PhiTilde;
    if (name == "psi") return WeightMember::Psi;
    if (name == "eta") return WeightMember::Eta;
    if (name == "sqrt_chi_prime") return WeightMember::SqrtChiPrime;
    if (name == "chi_sq") return WeightMember::ChiSq;
    if (name == "chi_sq_prime") return WeightMember::ChiSqPrime;
    if (name == "one") return WeightMember::One;
    throw LookupError("unknown weight member: " + std::string(name));
}

std::string weight_member_name(WeightMember m) {
    switch (m) {
        case WeightMember::Chi: return "chi";
        case WeightMember::Phi: return "phi";
        case WeightMember::PhiTilde: return "phi_tilde";
        case WeightMember::Psi: return "psi";
        case WeightMember::Eta: return "eta";
        case WeightMember::SqrtChiPrime: return "sqrt_chi_prime";
        case WeightMember::ChiSq: return "chi_sq";
        case WeightMember::ChiSqPrime: return "chi_sq_prime";
        case WeightMember::One: return "one";
    }
    return "?";
}

WeightFamily::WeightFamily(WeightParams params, unsigned max_derivative_order)
    : params_(params),
      max_order_(max_derivative_order),
      chi_moll_(params.epsilon),
      psi_moll_(params.epsilon / 8.0) {
    validate(params_);
    if (max_order_ + 1 > Mollifier::max_derivative_order)
        throw ConfigError("weight derivative order exceeds the mollifier derivative budget");
}

double WeightFamily::chi(double x) const {
    const double eps = params_.epsilon;
    const double b = params_.b;
    if (x <= eps) return 0.0;
    if (x >= b) return 1.0;
    const double slope = 1.0 / (b - 3.0 * eps);
    double acc = 0.0;
    // ramp part of nu on [2 eps, b - eps]
    const double lo = std::max(x - eps, 2.0 * eps);
    const double hi = std::min(x + eps, b - eps);
    if (hi > lo) {
        acc += integrate(
            [&](double y) { return chi_moll_.value(x - y) * (y - 2.0 * eps) * slope; }, lo, hi,
            /*panels=*/24, /*order=*/16);
    }
    // plateau part of nu (identically 1 above b - eps), as mollifier mass
    if (x + eps > b - eps) acc += chi_moll_.mass(-eps, x - (b - eps));
    return acc;
}

double WeightFamily::chi_derivative(double x, unsigned j) const {
    if (j == 0) return chi(x);
    if (j > max_order_) throw UnsupportedError("chi derivative order beyond the configured stack");
    const double eps = params_.epsilon;
    const double b = params_.b;
    const double slope = 1.0 / (b - 3.0 * eps);
    if (x <= eps || x >= b) return 0.0; // supp chi^(j) within [eps, b]
    if (j == 1) {
        // chi' = slope * integral of rho_eps(x - y) over the ramp window
        return slope * chi_moll_.mass(x - (b - eps), x - 2.0 * eps);
    }
    // chi^(j) = slope * [rho_eps^(j-2)(x - 2 eps) - rho_eps^(j-2)(x - (b - eps))]
    return slope *
           (chi_moll_.derivative(x - 2.0 * eps, j - 2) - chi_moll_.derivative(x - (b - eps), j - 2));
}

double WeightFamily::psi(double x) const {
    const double eps = params_.epsilon;
    const double step_at = 3.0 * eps / 8.0;
    if (x <= eps / 4.0) return 1.0;
    if (x >= eps / 2.0) return 0.0;
    return 1.0 - psi_moll_.mass_below(x - step_at);
}

double WeightFamily::psi_derivative(double x, unsigned j) const {
    if (j == 0) return psi(x);
    const double eps = params_.epsilon;
    const double step_at = 3.0 * eps / 8.0;
    return -psi_moll_.derivative(x - step_at, j - 1);
}

double WeightFamily::phi(double x) const { return 1.0 - eval(WeightMember::Chi, x) - eval(WeightMember::Psi, x); }

double WeightFamily::phi_tilde(double x) const {
    const double c = eval(WeightMember::Chi, x);
    const double p = eval(WeightMember::Psi, x);
    return clamped_sqrt(1.0 - c * c - p);
}

double WeightFamily::eta(double x) const {
    return clamped_sqrt(eval(WeightMember::Chi, x) * chi_derivative(x, 1));
}

double WeightFamily::sqrt_chi_prime(double x) const { return clamped_sqrt(chi_derivative(x, 1)); }

double WeightFamily::eval_raw(WeightMember m, double x) const {
    switch (m) {
        case WeightMember::Chi: return chi(x);
        case WeightMember::Phi: return phi(x);
        case WeightMember::PhiTilde: return phi_tilde(x);
        case WeightMember::Psi: return psi(x);
        case WeightMember::Eta: return eta(x);
        case WeightMember::SqrtChiPrime: return sqrt_chi_prime(x);
        case WeightMember::ChiSq: {
            const double c = eval(WeightMember::Chi, x);
            return c * c;
        }
        case WeightMember::ChiSqPrime:
            return 2.0 * eval(WeightMember::Chi, x) * chi_derivative(x, 1);
        case WeightMember::One: return 1.0;
    }
    return 0.0;
}

double WeightFamily::eval(WeightMember m, double x) const {
    auto it = overrides_.find(m);
    if (it != overrides_.end()) return it->second(x);
    return eval_raw(m, x);
}

double WeightFamily::shifted_eval(WeightMember m, double x, double v, double t) const {
    if (!std::isfinite(x) || !std::isfinite(v) || !std::isfinite(t))
        throw FieldError("shifted_eval: non-finite argument");
    return eval(m, x + v * t);
}

double WeightFamily::shifted_eval(std::string_view name, double x, double v, double t) const {
    return shifted_eval(weight_member_from_name(name), x, v, t);
}

std::vector<double> WeightFamily::sample(const Grid& g, WeightMember m, double shift) const {
    std::vector<double> xs(g.size());
    for (std::size_t j = 0; j < xs.size(); ++j) xs[j] = g.point(j);
    return sample_points(xs, m, shift);
}

std::vector<double> WeightFamily::sample_points(std::span<const double> xs, WeightMember m,
                                                double shift) const {
    std::vector<double> out(xs.size());
    const bool par = kernels::execution() == kernels::Exec::Parallel;
    const std::int64_t n = static_cast<std::int64_t>(xs.size());
#pragma omp parallel for schedule(static) if (par)
    for (std::int64_t i = 0; i < n; ++i) out[i] = eval(m, xs[i] + shift);
    return out;
}

WeightFamily WeightFamily::with_override(WeightMember m, std::function<double(double)> f) const {
    WeightFamily copy(*this);
    copy.overrides_[m] = std::move(f);
    return copy;
}

// ---------------------------------------------------------------- builders ---

namespace {
void check_resolution(const WeightParams& p, std::span<const double> xs) {
    if (xs.size() < 2) throw ConfigError("need at least two eval points");
    double max_gap = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) max_gap = std::max(max_gap, xs[i] - xs[i - 1]);
    const double required = p.epsilon / 16.0;
    if (max_gap > required) {
        std::ostringstream os;
        os << "eval points too coarse for the transition scale: spacing " << max_gap
           << " exceeds required epsilon/16 = " << required;
        throw ResolutionError(os.str());
    }
}
} // namespace

SampledWeight build_chi(const WeightParams& params, std::span<const double> eval_points,
                        unsigned max_order) {
    validate(params);
    check_resolution(params, eval_points);
    WeightFamily fam(params, max_order);
    SampledWeight out;
    out.points.assign(eval_points.begin(), eval_points.end());
    out.value = fam.sample_points(eval_points, WeightMember::Chi);
    out.derivs.resize(max_order);
    const bool par = kernels::execution() == kernels::Exec::Parallel;
    for (unsigned j = 1; j <= max_order; ++j) {
        out.derivs[j - 1].resize(eval_points.size());
        const std::int64_t n = static_cast<std::int64_t>(eval_points.size());
#pragma omp parallel for schedule(static) if (par)
        for (std::int64_t i = 0; i < n; ++i)
            out.derivs[j - 1][i] = fam.chi_derivative(eval_points[i], j);
    }
    return out;
}

WeightFamily build_partition(const WeightParams& params, std::span<const double> eval_points,
                             unsigned max_order) {
    validate(params);
    check_resolution(params, eval_points);
    WeightFamily fam(params, max_order);
    const double eps = params.epsilon;
    for (double x : eval_points) {
        const double c = fam.chi(x);
        const double p = fam.psi(x);
        const double radicand = 1.0 - c * c - p;
        if (radicand < -1e-10) {
            std::ostringstream os;
            os << "partition construction failed: negative radicand " << radicand << " at x = " << x;
            throw ConstructionError(os.str());
        }
        if (x < eps / 4.0 && std::abs(fam.phi(x)) > 1e-10) {
            std::ostringstream os;
            os << "partition construction failed: phi support leaks left of eps/4 at x = " << x;
            throw ConstructionError(os.str());
        }
        if (x > eps / 2.0 && std::abs(p) > 1e-10) {
            std::ostringstream os;
            os << "partition construction failed: psi support leaks right of eps/2 at x = " << x;
            throw ConstructionError(os.str());
        }
    }
    return fam;
}

// -------------------------------------------------------------- verifier ---

namespace {

struct Scan {
    std::vector<double> xs;
};

Scan make_scan(const WeightParams& p) {
    // Resolve the finest family in play (eps/5 scale) and cover every support.
    const double lo = -0.5 * p.b - p.epsilon;
    const double hi = 2.0 * p.b + 2.0 * p.epsilon;
    const double dx = p.epsilon / 80.0;
    Scan s;
    const std::size_t n = static_cast<std::size_t>(std::ceil((hi - lo) / dx)) + 1;
    s.xs.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.xs[i] = lo + dx * static_cast<double>(i);
    return s;
}

} // namespace

WeightVerifyReport verify_weight_properties(const WeightFamily& w) {
    const WeightParams p = w.params();
    const double eps = p.epsilon;
    const double b = p.b;
    WeightVerifyReport report;
    report.params = p;
    Scan scan = make_scan(p);
    const auto& xs = scan.xs;
    const std::size_t n = xs.size();

    const WeightFamily enlarged(WeightParams{eps / 3.0, b + eps}, w.max_derivative_order());
    const WeightFamily tight(WeightParams{eps / 5.0, eps}, 1);

    // One parallel sampling pass per function, then cheap array scans.
    const auto chi = w.sample_points(xs, WeightMember::Chi);
    const auto phi = w.sample_points(xs, WeightMember::Phi);
    const auto phi_t = w.sample_points(xs, WeightMember::PhiTilde);
    const auto psi = w.sample_points(xs, WeightMember::Psi);
    const auto chi_en = enlarged.sample_points(xs, WeightMember::Chi);
    const auto chi_ti = tight.sample_points(xs, WeightMember::Chi);

    const bool par = kernels::execution() == kernels::Exec::Parallel;
    auto sample_deriv = [&](const WeightFamily& fam, unsigned j) {
        std::vector<double> out(n);
        const std::int64_t nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (par)
        for (std::int64_t i = 0; i < nn; ++i) out[i] = fam.chi_derivative(xs[i], j);
        return out;
    };
    const auto chi_p = sample_deriv(w, 1);
    const auto chi_en_p = sample_deriv(enlarged, 1);
    std::vector<std::vector<double>> chi_dj(w.max_derivative_order());
    chi_dj[0] = chi_p;
    for (unsigned j = 2; j <= w.max_derivative_order(); ++j) chi_dj[j - 1] = sample_deriv(w, j);

    auto scan_min = [&](std::string id, std::string desc, double tol,
                        const std::function<double(std::size_t)>& residual) {
        PropertyCheck c{std::move(id), std::move(desc), tol, 1e300, 0.0, true, {}};
        for (std::size_t i = 0; i < n; ++i) {
            const double r = residual(i);
            if (r < c.worst_residual) {
                c.worst_residual = r;
                c.worst_x = xs[i];
            }
        }
        c.pass = c.worst_residual >= -tol;
        return c;
    };

    // P1: chi' >= 0
    report.checks.push_back(scan_min("P1", "chi' >= 0", 1e-12,
                                     [&](std::size_t i) { return chi_p[i]; }));

    // P2: chi = 0 below eps, 1 above b
    report.checks.push_back(scan_min("P2", "chi = 0 on x <= eps and 1 on x >= b", 1e-12,
                                     [&](std::size_t i) {
                                         if (xs[i] <= eps) return -std::abs(chi[i]);
                                         if (xs[i] >= b) return -std::abs(chi[i] - 1.0);
                                         return 0.0;
                                     }));

    // P3: supp chi in [eps, inf)
    report.checks.push_back(scan_min("P3", "supp(chi) within [eps, inf)", 1e-12,
                                     [&](std::size_t i) {
                                         return xs[i] < eps ? -std::abs(chi[i]) : 0.0;
                                     }));

    // P4: chi' >= 1/(10(b-eps)) on [2 eps, b-2 eps]
    const double p4_bound = 1.0 / (10.0 * (b - eps));
    report.checks.push_back(scan_min("P4", "chi' >= 1/(10(b-eps)) on [2eps, b-2eps]", 1e-12,
                                     [&](std::size_t i) {
                                         if (xs[i] < 2.0 * eps || xs[i] > b - 2.0 * eps) return 0.0;
                                         return chi_p[i] - p4_bound;
                                     }));

    // P5: supp chi' within [eps, b]
    report.checks.push_back(scan_min("P5", "supp(chi') within [eps, b]", 1e-12,
                                     [&](std::size_t i) {
                                         return (xs[i] < eps || xs[i] > b) ? -std::abs(chi_p[i])
                                                                           : 0.0;
                                     }));

    // P6: |chi^(j)| <= c_j * chi'_{eps/3, b+eps}, measured c_j per order
    {
        PropertyCheck c{"P6", "|chi^(j)| dominated by chi'_{eps/3,b+eps} (measured c_j)", 0.0,
                        0.0,  0.0,
                        true, {}};
        for (unsigned j = 1; j <= w.max_derivative_order(); ++j) {
            double cj = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double num = std::abs(chi_dj[j - 1][i]);
                if (num < 1e-300) continue;
                if (chi_en_p[i] <= 0.0) {
                    cj = std::numeric_limits<double>::infinity();
                    c.worst_x = xs[i];
                    break;
                }
                cj = std::max(cj, num / chi_en_p[i]);
            }
            c.constants.push_back(cj);
            if (!std::isfinite(cj)) c.pass = false;
        }
        report.checks.push_back(std::move(c));
    }

    // P7: chi >= eps/(2(b-3eps)) for x > 3 eps
    const double p7_bound = 0.5 * eps / (b - 3.0 * eps);
    report.checks.push_back(scan_min("P7", "chi >= eps/(2(b-3eps)) on (3eps, inf)", 1e-10,
                                     [&](std::size_t i) {
                                         return xs[i] > 3.0 * eps ? chi[i] - p7_bound : 0.0;
                                     }));

    // P8: chi'_{eps/3, b+eps} <= eps/(b-3eps), as stated. The construction
    // makes sup chi'_{eps/3,b+eps} equal the enlarged ramp slope 1/b exactly,
    // so this check fails whenever 1/b > eps/(b-3eps); the verifier reports
    // the measured sup rather than papering over it.
    {
        const double p8_bound = eps / (b - 3.0 * eps);
        PropertyCheck c = scan_min("P8", "chi'_{eps/3,b+eps} <= eps/(b-3eps) (as stated)", 1e-12,
                                   [&](std::size_t i) { return p8_bound - chi_en_p[i]; });
        double sup = 0.0;
        for (std::size_t i = 0; i < n; ++i) sup = std::max(sup, chi_en_p[i]);
        c.constants = {sup, p8_bound};
        report.checks.push_back(std::move(c));
    }

    // P9: chi' <= c1 chi'_{eps/3,b+eps} chi_{eps/3,b+eps} and chi' <= c2 chi_{eps/5,eps}
    {
        PropertyCheck c{"P9", "chi' domination constants c1, c2 (measured)", 0.0, 0.0, 0.0, true, {}};
        double c1 = 0.0, c2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double num = chi_p[i];
            if (num < 1e-300) continue;
            const double d1 = chi_en_p[i] * chi_en[i];
            const double d2 = chi_ti[i];
            if (d1 <= 0.0 || d2 <= 0.0) {
                c.pass = false;
                c.worst_x = xs[i];
                c1 = c2 = std::numeric_limits<double>::infinity();
                break;
            }
            c1 = std::max(c1, num / d1);
            c2 = std::max(c2, num / d2);
        }
        c.constants = {c1, c2};
        report.checks.push_back(std::move(c));
    }

    // P10: eta and sqrt(chi') radicands stay above the clamp floor
    report.checks.push_back(scan_min("P10", "radicands of eta and sqrt(chi') >= clamp floor",
                                     -kRadicandFloor, [&](std::size_t i) {
                                         return std::min(chi[i] * chi_p[i], chi_p[i]);
                                     }));

    // P11: supports of phi, phi~ within [eps/4, b]
    report.checks.push_back(scan_min("P11", "supp(phi), supp(phi~) within [eps/4, b]", 1e-10,
                                     [&](std::size_t i) {
                                         if (xs[i] >= eps / 4.0 && xs[i] <= b) return 0.0;
                                         return -std::max(std::abs(phi[i]), std::abs(phi_t[i]));
                                     }));

    // P12: phi = phi~ = 1 on [eps/2, eps]
    report.checks.push_back(scan_min("P12", "phi = phi~ = 1 on [eps/2, eps]", 1e-10,
                                     [&](std::size_t i) {
                                         if (xs[i] < eps / 2.0 || xs[i] > eps) return 0.0;
                                         return -std::max(std::abs(phi[i] - 1.0),
                                                          std::abs(phi_t[i] - 1.0));
                                     }));

    // P13: supp psi within (-inf, eps/2]
    report.checks.push_back(scan_min("P13", "supp(psi) within (-inf, eps/2]", 1e-12,
                                     [&](std::size_t i) {
                                         return xs[i] > eps / 2.0 ? -std::abs(psi[i]) : 0.0;
                                     }));

    // P14: the two partitions of unity
    report.checks.push_back(scan_min("P14", "chi+phi+psi = 1 and chi^2+phi~^2+psi = 1", 1e-10,
                                     [&](std::size_t i) {
                                         const double r1 = std::abs(chi[i] + phi[i] + psi[i] - 1.0);
                                         const double r2 = std::abs(chi[i] * chi[i] +
                                                                    phi_t[i] * phi_t[i] +
                                                                    psi[i] - 1.0);
                                         return -std::max(r1, r2);
                                     }));

    for (const auto& c : report.checks) report.overall_pass = report.overall_pass && c.pass;
    return report;
}

// -------------------------------------------------------- operator weights ---

OperatorWeight periodic_ramp_weight(GridPtr g, const WeightFamily& fam, double x0,
                                    unsigned max_order, std::optional<double> descent_anchor) {
    const double L = g->half_length();
    const double b = fam.params().b;
    const double eps = fam.params().epsilon;
    const double xr = descent_anchor.value_or(L - b - std::max(1.0, 4.0 * eps));
    if (!(x0 + b < xr) || !(xr + b < L))
        throw ConfigError("periodic ramp weight: descent must fit between the plateau and the "
                          "right boundary");
    OperatorWeight w;
    w.grid = g;
    const std::size_t n = g->size();
    w.value.resize(n);
    w.derivs.assign(max_order, std::vector<double>(n));
    const bool par = kernels::execution() == kernels::Exec::Parallel;
    const std::int64_t nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (par)
    for (std::int64_t i = 0; i < nn; ++i) {
        const double x = g->point(static_cast<std::size_t>(i));
        w.value[i] = fam.chi(x - x0) - fam.chi(x - xr);
        for (unsigned j = 1; j <= max_order; ++j)
            w.derivs[j - 1][i] = fam.chi_derivative(x - x0, j) - fam.chi_derivative(x - xr, j);
    }
    return w;
}

OperatorWeight constant_weight(GridPtr g, double c, unsigned max_order) {
    OperatorWeight w;
    w.grid = g;
    w.value.assign(g->size(), c);
    w.derivs.assign(max_order, std::vector<double>(g->size(), 0.0));
    return w;
}

OperatorWeight callable_weight(GridPtr g, const std::function<double(double)>& f,
                               const std::vector<std::function<double(double)>>& derivs) {
    OperatorWeight w;
    w.grid = g;
    const std::size_t n = g->size();
    w.value.resize(n);
    for (std::size_t i = 0; i < n; ++i) w.value[i] = f(g->point(i));
    w.derivs.assign(derivs.size(), std::vector<double>(n));
    for (std::size_t j = 0; j < derivs.size(); ++j)
        for (std::size_t i = 0; i < n; ++i) w.derivs[j][i] = derivs[j](g->point(i));
    return w;
}

} // namespace fkdv
