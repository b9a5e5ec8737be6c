#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "kerr/fock.hpp"
#include "kerr/grid.hpp"
#include "kerr/observables.hpp"
#include "kerr/pulse.hpp"

namespace kerr {

enum class Integrator {
    /// Fourth-order Runge-Kutta in the frame of the diagonal Hamiltonian
    /// (integrating-factor RK4); the Kerr ladder phases are applied exactly.
    interaction_rk4,
    /// Classical fourth-order Runge-Kutta on the full generator.
    classical_rk4,
};

/// Step-size constant: dt <= kStepSafety / (largest generator rate).
inline constexpr double kStepSafety = 0.05;
/// Population allowed in the top three basis states before the run aborts.
inline constexpr double kTruncationTolerance = 1e-6;

struct EvolutionConfig {
    double t_end = 22.0;
    double dt_max = 1e-2;
    double sample_dt = 0.01;
    /// Defaults to thermal_state(dim, n_th).
    std::optional<DensityMatrix> initial_state;
    std::size_t report_levels = 5;
    Integrator integrator = Integrator::interaction_rk4;
    bool check_positivity = true;
    bool keep_states = false;
    double truncation_tolerance = kTruncationTolerance;

    void validate(const SystemParams& p) const;
};

struct SolverDiagnostics {
    double step = 0.0;
    std::size_t steps = 0;
    double max_trace_drift_rate = 0.0; ///< |Tr rho - 1| per unit time, before renormalization
    double min_eigenvalue = 1.0;
    double max_top_population = 0.0;
    double max_hermiticity_error = 0.0;
};

struct StateTrajectory {
    std::vector<double> times;
    std::vector<ObservableRecord> records;
    std::vector<complex> coherence; ///< <a>(t)
    std::vector<DensityMatrix> states; ///< empty unless keep_states
    DensityMatrix final_state{Matrix::Zero(1, 1)};
    SolverDiagnostics diagnostics;
};

/// d rho / dt of the Lindblad master equation at time t, Hermitian-symmetrized.
Matrix liouvillian_apply(const DensityMatrix& rho, double t, const SystemParams& p,
                         const PulseTrain& train);

/// Step cap applied by evolve for the chosen integrator.
double step_cap(const EvolutionConfig& cfg, const SystemParams& p, const PulseTrain& train);

/// Fixed-step integration of the master equation on the config's sample grid.
/// Each sample renormalizes the trace and re-Hermitizes. Throws
/// TruncationOverflow when the top basis states become populated.
StateTrajectory evolve(const EvolutionConfig& cfg, const SystemParams& p, const PulseTrain& train);

} // namespace kerr
