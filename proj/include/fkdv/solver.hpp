#pragma once

#include "fkdv/errors.hpp"
#include "fkdv/field.hpp"
#include "fkdv/spectral.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace fkdv {

// The integrated form is du/dt = D^alpha u_x - u u_x: dispersion handled
// exactly in Fourier space, the quadratic term in divergence form -(u^2/2)_x
// with two-thirds dealiasing.

enum class Scheme { Etdrk4, Imex2 };

struct SolverConfig {
    double alpha = 0.75;
    double dt = 1e-3;
    double t_final = 1.0;
    bool dealias = true;
    bool linear_only = false; // drop the nonlinearity (dispersive flow alone)
    Scheme scheme = Scheme::Etdrk4;
    double contamination_threshold = 1e-6;
    std::size_t output_cadence = 50; // observer invocations across the run
};

struct ConservedSample {
    double t = 0.0;
    double mass = 0.0;
    double l2 = 0.0; // squared L2 norm
    double hamiltonian = 0.0;
    double strichartz_accum = 0.0; // running integral of ||u_x||_inf
};

struct SolverState {
    double t = 0.0;
    Field u;
    std::size_t step_count = 0;
    std::vector<ConservedSample> conserved_log;
    double strichartz_accum = 0.0;
    double max_boundary_fraction = 0.0; // contamination diagnostic
    bool contamination_warning = false;
};

struct SolverBlowUp : BlowUpError {
    SolverBlowUp(const std::string& msg, double t, SolverState last_good)
        : BlowUpError(msg, t), partial(std::move(last_good)) {}
    SolverState partial;
};

/// Dispersion multiplier i xi |xi|^alpha; rejects alpha outside (0,1).
MultiplierSymbol linear_symbol(GridPtr g, double alpha);

/// -(u^2/2)_x, dealiased by zeroing modes above n/3 when requested.
Field nonlinear_term(const Field& u, bool dealias);

struct ConservedQuantities {
    double mass = 0.0;
    double l2 = 0.0;
    double hamiltonian = 0.0;
};

/// mass = integral of u, l2 = ||u||_2^2,
/// H = integral of (u D^alpha u / 2 - u^3 / 6).
ConservedQuantities conserved(const Field& u, double alpha);

/// Precomputed stepping tables for one (grid, alpha, dt, scheme) tuple.
/// The phi-function weights are evaluated as means over a unit circle of
/// contour points around each h*lambda, which stays stable near zero.
class TimeStepper {
  public:
    TimeStepper(GridPtr grid, const SolverConfig& config);
    ~TimeStepper();
    TimeStepper(const TimeStepper&) = delete;
    TimeStepper& operator=(const TimeStepper&) = delete;

    /// Advances the spectral state by one step of dt (throws BlowUpError).
    void advance(std::vector<cplx>& spectrum) const;
    const SolverConfig& config() const;

    /// Time-reversed linear step (testing aid; exact inverse of the linear flow).
    void advance_linear_backward(std::vector<cplx>& spectrum) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One step of the configured scheme. Convenience wrapper that builds the
/// stepping tables on the fly; loops should use TimeStepper directly.
SolverState step(const SolverState& state, const SolverConfig& config);

using Observer = std::function<void(const SolverState&)>;

/// Advances to t_final, sampling conserved quantities and invoking observers
/// on the configured cadence. Throws SolverBlowUp carrying the partial log.
SolverState run(const Field& initial, const SolverConfig& config,
                const std::vector<Observer>& observers = {});

/// Continues a run from a restored state; the absolute step schedule makes
/// the trajectory bitwise identical to an uninterrupted run.
SolverState resume_run(SolverState state, const SolverConfig& config,
                       const std::vector<Observer>& observers = {});

} // namespace fkdv
