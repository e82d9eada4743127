#pragma once

#include "fkdv/field.hpp"
#include "fkdv/weights.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace fkdv {

/// Coefficient c_{2j+1} of the sandwich expansion:
/// c_1 = 1, c_{2j+1} = prod_{0<=k<j}(a^2 - (2k+1)^2) / (2j+1)!
double expansion_coefficient(double a, unsigned j);

/// The unique order n with 2n+1 <= a + 2 sigma <= 2n+3 (ties resolved to the
/// smaller n); nullopt when a + 2 sigma < 1.
std::optional<unsigned> admissible_order(double a, double sigma);

/// Order-n expansion of the commutator [H D^a; f]: a finite sum of symmetric
/// sandwich operators plus an L2-bounded remainder.
struct CommutatorExpansion {
    double a = 1.0;             // outer exponent, a = 2 mu + 1
    double mu = 0.0;            // inner Riesz exponent
    unsigned order = 0;         // n
    std::vector<double> coeffs; // c_{2j+1}, j = 0..n
    OperatorWeight weight;      // f, with derivatives up to 2n+1
};

CommutatorExpansion make_expansion(double a, unsigned order, OperatorWeight weight);

/// Sandwich sum a * sum_j c_{2j+1} (-1)^j 4^{-j} D^{mu-j} f^(2j+1) D^{mu-j} u.
/// Requires mu >= order (negative Riesz exponents are rejected).
Field apply_sandwich_sum(const CommutatorExpansion& exp, const Field& u);

/// [H D^a; f] u = H D^a(f u) - f H D^a u.
Field apply_dispersion_bracket(const OperatorWeight& f, double a, const Field& u);

/// Remainder R_n(a) u = -[H D^a; f] u - (P_n - H P_n H) u / 2.
Field apply_remainder(const CommutatorExpansion& exp, const Field& u);

/// D^sigma R_n(a) D^sigma u with the Riesz exponents fused per term, so the
/// composition is defined whenever sigma + mu >= order even though the bare
/// sandwich sum would need negative exponents.
Field apply_smoothed_remainder(const CommutatorExpansion& exp, double sigma, const Field& u);

struct BoundCheckSpec {
    double sigma = 0.0;
    std::size_t ensemble_size = 100;
    std::size_t band_limit = 0; // 0: n_points / 4
    std::uint64_t seed = 0x5eed;
    double pass_slack = 1.05;
};

struct RemainderBoundReport {
    double a = 0.0;
    unsigned order = 0;
    double sigma = 0.0;
    std::size_t samples = 0;
    double max_ratio = 0.0;     // max over ensemble of ||D^s R D^s u|| / rhs
    double rhs_constant = 0.0;  // (2 pi)^{-1/2} * discrete l1 mass of (D^{a+2s} f)^
    bool unit_constant_applies = false; // a >= 2n+1, where the bound constant is 1
    std::optional<bool> pass;           // set only when unit_constant_applies
};

/// Ensemble check of the remainder operator norm against the spectral-mass
/// bound; requires the admissibility window to hold.
RemainderBoundReport check_remainder_bound(const CommutatorExpansion& exp,
                                           const BoundCheckSpec& spec);

// ------------------------------------------------------ inequality probes ---

enum class ProbeKind {
    Calderon,           // ||d^l [H; psi] d^m f||_p <= c ||d^{m+l} psi||_inf ||f||_p
    Leibniz,            // ||D^s(fg)||_p <= c(||f||_inf ||D^s g||_p + ||g||_inf ||D^s f||_p)
    KatoPonceA,         // 0 < s <= 1: ||D^s(fg) - f D^s g||_p <= c ||D^{s-1} f'||_inf ||g||_p
    KatoPonceB,         // s > 1: + ||f'||_inf ||D^{s-1} g||_p
    GagliardoNirenberg, // ||D^a f||_p <= c ||f||_r^{1-th} ||D^b f||_q^th
    DisjointSupport     // ||g d^m D^s f||_p <= c ||g||_p ||f||_2 for separated supports
};

ProbeKind probe_kind_from_name(std::string_view name); // throws LookupError
std::string probe_kind_name(ProbeKind k);

struct ProbeParams {
    double s = 0.7;                 // fractional order
    unsigned l = 1;                 // Calderon outer derivatives
    unsigned m = 1;                 // Calderon inner / disjoint-support derivatives
    double gn_alpha = 0.5;          // Gagliardo-Nirenberg lower order
    double gn_beta = 2.0;           // Gagliardo-Nirenberg higher order
    double p = 2.0;                 // target norm: 2 or inf (inf encoded as 0)
    double delta = 4.0;             // support separation
    std::size_t ensemble_size = 40;
    std::size_t band_limit = 0;     // 0: n_points / 6
    std::uint64_t seed = 0x5eed;
};

struct ProbeReport {
    ProbeKind kind;
    std::size_t samples = 0;
    double best_constant = 0.0; // max over ensemble of LHS / RHS
    double mean_ratio = 0.0;
};

ProbeReport inequality_probe(ProbeKind kind, GridPtr grid, const ProbeParams& params);

} // namespace fkdv
