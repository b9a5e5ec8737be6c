#pragma once

#include <optional>
#include <vector>

#include "kerr/fock.hpp"
#include "kerr/pulse.hpp"

namespace kerr {

/// Closed first-moment solution of the linear (chi = 0) driven cavity,
/// d alpha / dt = -(i Delta + gamma / 2) alpha - i Omega f(t).
struct LinearCavitySolution {
    std::vector<double> times;
    std::vector<complex> alpha;
    double n_th = 0.0;
};

/// Integrates the scalar equation by exact exponential propagation between
/// grid points and composite Gauss-Legendre quadrature of the drive, with
/// panels no longer than max_panel. Requires p.chi == 0 and sorted times
/// starting at or after zero.
LinearCavitySolution linear_cavity_alpha(const SystemParams& p, const PulseTrain& train,
                                         const std::vector<double>& times, complex alpha0 = 0.0,
                                         double max_panel = 1e-3);

struct DisplacedThermalStats {
    double mean_n = 0.0;
    std::optional<double> g2;
};

/// Exact moments of a displaced thermal state.
DisplacedThermalStats displaced_thermal_stats(complex alpha, double n_th);

struct RabiPrediction {
    double pulse_area = 0.0; ///< 2 |Omega| T sqrt(pi)
    double cycles = 0.0;     ///< pulse_area / (2 pi)
    bool strongly_selective = false; ///< chi T > 1 at zero detuning
};

/// Two-level (|0>, |1>) estimate of the population cycles driven by one pulse.
/// Throws InvalidParameter unless Delta = 0.
RabiPrediction two_level_rabi_check(const SystemParams& p, const PulseTrain& train);

} // namespace kerr
