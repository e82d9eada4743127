#pragma once

#include "fkdv/field.hpp"
#include "fkdv/grid.hpp"
#include "fkdv/mollifier.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fkdv {

struct WeightParams {
    double epsilon = 0.1;
    double b = 1.0;
};

enum class WeightMember {
    Chi,          // smooth ramp, 0 below epsilon, 1 above b
    Phi,          // 1 - chi - psi
    PhiTilde,     // sqrt(1 - chi^2 - psi)
    Psi,          // mollified descending step, 1 far left, 0 above epsilon/2
    Eta,          // sqrt(chi * chi')
    SqrtChiPrime, // sqrt(chi')
    ChiSq,        // chi^2
    ChiSqPrime,   // (chi^2)' = 2 chi chi'
    One           // constant 1 (unweighted diagnostics)
};

WeightMember weight_member_from_name(std::string_view name); // throws LookupError
std::string weight_member_name(WeightMember m);

/// The cutoff family built by mollifying a piecewise-linear ramp:
/// chi = rho_eps * nu with nu rising linearly on [2 eps, b - eps], plus the
/// partition members phi, phi~, psi and the derived eta, sqrt(chi').
///
/// Evaluation is exact up to quadrature tolerance at arbitrary points, so
/// moving-window shifts x + v t never interpolate. Derivatives of chi push
/// the differentiation onto the mollifier: chi^(j) = rho_eps^(j-1) * nu',
/// which collapses to endpoint evaluations of rho^(j-2) for j >= 2.
/// Immutable after construction; safe to share across threads.
class WeightFamily {
  public:
    WeightFamily(WeightParams params, unsigned max_derivative_order = 7);

    const WeightParams& params() const noexcept { return params_; }
    unsigned max_derivative_order() const noexcept { return max_order_; }

    double chi(double x) const;
    double chi_derivative(double x, unsigned j) const;
    double psi(double x) const;
    double psi_derivative(double x, unsigned j) const;
    double phi(double x) const;
    double phi_tilde(double x) const;
    double eta(double x) const;
    double sqrt_chi_prime(double x) const;

    double eval(WeightMember m, double x) const;
    /// Family member evaluated at the moving-window argument x + v t.
    double shifted_eval(WeightMember m, double x, double v, double t) const;
    double shifted_eval(std::string_view name, double x, double v, double t) const;

    /// Samples m(x_j + shift) over the grid (parallel when enabled).
    std::vector<double> sample(const Grid& g, WeightMember m, double shift = 0.0) const;
    std::vector<double> sample_points(std::span<const double> xs, WeightMember m,
                                      double shift = 0.0) const;

    /// Testing hook: swap out one member's evaluator (used to exercise the
    /// property verifier against deliberately broken families).
    WeightFamily with_override(WeightMember m, std::function<double(double)> f) const;

  private:
    double eval_raw(WeightMember m, double x) const;
    WeightParams params_;
    unsigned max_order_;
    Mollifier chi_moll_;
    Mollifier psi_moll_;
    std::map<WeightMember, std::function<double(double)>> overrides_;
};

/// chi and its derivative stack sampled on caller points.
struct SampledWeight {
    std::vector<double> points;
    std::vector<double> value;
    std::vector<std::vector<double>> derivs; // derivs[j-1][i] = chi^(j)(x_i)
};

/// Samples chi_{eps,b}; rejects spacing coarser than eps/16 (ResolutionError)
/// and b < 5 eps (ConfigError).
SampledWeight build_chi(const WeightParams& params, std::span<const double> eval_points,
                        unsigned max_order = 7);

/// Builds the full family and verifies the construction guarantees on the
/// eval points (nonnegative radicands, supports); throws ConstructionError
/// with the offending location otherwise.
WeightFamily build_partition(const WeightParams& params, std::span<const double> eval_points,
                             unsigned max_order = 7);

struct PropertyCheck {
    std::string id;          // "P1".."P14" with sub-labels
    std::string description;
    double tolerance = 0.0;
    double worst_residual = 0.0; // negative residual == violation beyond tolerance
    double worst_x = 0.0;
    bool pass = true;
    std::vector<double> constants; // measured constants (P6, P9)
};

struct WeightVerifyReport {
    WeightParams params;
    std::vector<PropertyCheck> checks;
    bool overall_pass = true;
};

/// Checks the full property list of the family on a fine scan and reports
/// per-property residuals; measured constants are reported where the family
/// only promises existence.
WeightVerifyReport verify_weight_properties(const WeightFamily& w);

/// Grid samples of a commutator weight together with its derivative stack.
/// The ramp is closed off by a mirrored descent near the right edge of the
/// box so the periodic extension is smooth and f' is compactly supported
/// inside the domain.
struct OperatorWeight {
    GridPtr grid;
    std::vector<double> value;
    std::vector<std::vector<double>> derivs;
    unsigned max_order() const { return static_cast<unsigned>(derivs.size()); }
    std::span<const double> derivative(unsigned j) const { return derivs.at(j - 1); }
};

OperatorWeight periodic_ramp_weight(GridPtr g, const WeightFamily& fam, double x0,
                                    unsigned max_order = 7,
                                    std::optional<double> descent_anchor = std::nullopt);
OperatorWeight constant_weight(GridPtr g, double c, unsigned max_order = 7);
OperatorWeight callable_weight(GridPtr g, const std::function<double(double)>& f,
                               const std::vector<std::function<double(double)>>& derivs);

} // namespace fkdv
