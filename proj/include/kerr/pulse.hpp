#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kerr/fock.hpp"

namespace kerr {

/// Train of Gaussian pulses f(t) = sum_n exp(-(t - t0 - n tau)^2 / T^2), scaled
/// by the complex amplitude omega when it drives the resonator.
struct PulseTrain {
    complex omega{0.0, 0.0};
    double width_T = 0.4;
    double period_tau = 5.5;
    double t0 = 2.0;
    /// Number of pulses; empty means unbounded.
    std::optional<std::size_t> count;

    void validate() const;
    /// Center of pulse `n` (zero-based).
    double center(std::size_t n) const { return t0 + static_cast<double>(n) * period_tau; }
    /// Pulse indices whose centers lie in [0, t_end].
    std::size_t pulses_within(double t_end) const;
};

/// Gaussian terms farther than this many widths from t are dropped.
inline constexpr double kEnvelopeCutoffWidths = 8.0;

double envelope(const PulseTrain& train, double t);

/// Upper bound on max_t f(t), used for step-size control.
double envelope_bound(const PulseTrain& train);

/// Pulse count that spans [0, t_end]: ceil(t_end / tau) + 1.
std::size_t window_spanning_count(double t_end, double period_tau);

/// Detuning that makes the |0> -> |n> multiphoton transition resonant.
double resonance_detuning(int n, double chi);

struct SelectivityReport {
    bool shorter_than_lifetime = true; ///< gamma T < 1
    bool spectrally_resolved = true;   ///< chi T > 1
    bool separated = true;             ///< gamma tau > 1
    std::vector<std::string> warnings;

    bool ok() const noexcept { return warnings.empty(); }
};

SelectivityReport validate_selectivity(const PulseTrain& train, const SystemParams& p);

} // namespace kerr
