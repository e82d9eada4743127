#pragma once

#include "fkdv/field.hpp"
#include "fkdv/solver.hpp"
#include "fkdv/weights.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace fkdv {

// ---------------------------------------------------------------- ladder ---

enum class LadderCase { OddSteps, EvenSteps }; // 2k+1 vs 2k+2 fractional rungs

struct LadderPlan {
    int m = 2;
    double alpha = 0.75;
    int k = 1;
    LadderCase tag = LadderCase::OddSteps;
    std::vector<double> step_exponents; // m + alpha*j/2 for j = 0..ceil(2/alpha)-1
    double final_exponent = 0.0;        // m + 1 - alpha/2
};

/// Schedule of fractional regularity steps: ceil(2/alpha) rungs of size
/// alpha/2 and a final step of size 1 - alpha/2, with the odd/even-step
/// classification by the integer k with 2/(2k+1) <= alpha < 1/k (odd) or
/// 1/(k+1) <= alpha < 2/(2k+1) (even).
LadderPlan ladder_plan(double alpha, int m);

// --------------------------------------------------------------- windows ---

struct DiagnosticWindow {
    double x0 = 0.0;
    double epsilon = 0.5;
    double b = 2.5;
    double tau = 2.5; // right edge of the smoothing strip
    double v = 1.0;   // leftward window speed
};

/// Enforces tau > 4 eps, b >= 5 eps, v >= 0 (ConfigError otherwise).
void validate_window(const DiagnosticWindow& w);

/// Weight member sampled at the moving-window argument x - x0 + v t.
std::vector<double> window_weight_samples(const Grid& g, const WeightFamily& fam,
                                          WeightMember member, const DiagnosticWindow& win,
                                          double t);

/// integral of (d^j/dx^j D^s u)^2 * w^power over the grid, with w the member
/// evaluated at x - x0 + v t. power = 2 matches the energy functionals,
/// power = 1 the linear-weight terms of the partitions.
double weighted_energy(const Field& u, unsigned j, double s, const WeightFamily& fam,
                       WeightMember member, const DiagnosticWindow& win, double t,
                       int weight_power = 2);
double weighted_energy_with(const Field& u, unsigned j, double s,
                            std::span<const double> weight_samples, int weight_power = 2);

// ------------------------------------------------------------- smoothing ---

/// Time-accumulated local-smoothing integral of one exponent pair: the
/// spatial integral of (d^j D^s u)^2 against (chi^2)'(x - x0 + v t) and its
/// Hilbert twin, integrated in t by trapezoid over the samples seen so far.
struct SmoothingRecord {
    DiagnosticWindow window;
    unsigned deriv_order = 0; // j
    double riesz_order = 0.0; // s
    std::vector<double> times;
    std::vector<double> integrand;         // strip integral at each time
    std::vector<double> integrand_hilbert; // Hilbert-conjugated twin
    double accum = 0.0;
    double accum_hilbert = 0.0;
    /// Secondary number: same integrand against the sharp strip indicator
    /// [x0+eps-vt, x0+tau-vt] instead of the smooth (chi^2)' weight.
    double accum_sharp_strip = 0.0;
    double last_sharp_integrand = 0.0;
};

/// Appends one time sample; time must increase strictly (SequencingError).
void smoothing_update(SmoothingRecord& rec, const Field& u, const WeightFamily& fam, double t);
/// Same with precomputed (chi^2)' samples at this time's window shift.
void smoothing_update_with(SmoothingRecord& rec, const Field& u,
                           std::span<const double> chi_sq_prime_samples, double t);

/// Trapezoid over every `stride`-th stored sample (refinement checks).
double smoothing_total(const SmoothingRecord& rec, std::size_t stride = 1, bool hilbert_twin = false);

// ------------------------------------------------------------- test data ---

struct OneSidedProfile {
    double gamma = 1.3;      // ramp power of the one-sided singularity
    double x_s = -10.0;      // singularity location (left of the windows)
    double amplitude = 1.0;  // 0 switches the singular part off
    double bump_radius = 6.0;
    double background_amplitude = 1.0;
    double background_center = 0.0;
    double background_width = 3.0;
};

/// Smooth background plus a localized |x - x_s|^gamma kink. gamma must keep
/// the data above the solver's regularity floor (gamma + 1/2 > 2 - alpha/2)
/// while breaking H^m at x_s (gamma <= m - 1/2); ConfigError names the range.
Field one_sided_data(const OneSidedProfile& profile, int m, double alpha, GridPtr grid);

/// Least-squares decay fit of log |u_hat| against log xi over the upper
/// spectral band; returns the implied Sobolev regularity (decay - 1/2).
double estimate_spectral_regularity(const Field& u);

/// Bona-Smith style premollification: spectral multiplication by the
/// transform of the standard bump at scale mu.
Field mollify_initial_data(const Field& u, double mu);

// ------------------------------------------------- propagation experiment ---

struct PropagationConfig {
    SolverConfig solver;
    GridPtr grid;
    int m = 2;
    std::vector<DiagnosticWindow> windows{DiagnosticWindow{}};
    std::optional<OneSidedProfile> profile; // nullopt: smooth Gaussian control
    double kappa = 50.0;            // right-window boundedness factor
    double refine_tolerance = 0.10; // smoothing refinement stability
    double left_retention = 0.5;    // required fraction of initial left-octave energy
    double mollify_mu = 0.0;        // premollification scale (0 = off)
};

struct EnergyTrack {
    std::size_t window_index = 0;
    double exponent = 0.0; // m + s
    unsigned j = 0;
    double s = 0.0;
    std::vector<double> times;
    std::vector<double> values;
    double initial = 0.0;
    double sup = 0.0;
};

struct PropagationResult {
    LadderPlan plan;
    std::vector<EnergyTrack> energies;
    std::vector<SmoothingRecord> smoothing;
    std::vector<double> left_octave_times;
    std::vector<double> left_octave_energy;
    bool right_bounded = false;
    bool smoothing_stable = false;
    bool left_check_applicable = false;
    bool left_retained = false;
    bool pass = false;
    double max_boundary_fraction = 0.0;
    std::optional<SolverState> final_state;
};

/// Runs the solver on one-sided (or smooth control) data and evaluates the
/// moving-window ladder energies, smoothing accumulators and the left-side
/// roughness proxy; the verdict applies the configured boundedness and
/// stability thresholds.
PropagationResult run_propagation_experiment(const PropagationConfig& config);

} // namespace fkdv
