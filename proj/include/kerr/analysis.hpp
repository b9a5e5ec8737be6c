#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "kerr/observables.hpp"
#include "kerr/pulse.hpp"

namespace kerr {

/// Half width, in units of T, of the window attributed to each pulse.
inline constexpr double kWindowHalfWidths = 3.0;
/// Minimum swing for a turning point to count as an oscillation extremum.
inline constexpr double kExtremumProminence = 0.01;

struct Window {
    double lo = 0.0;
    double hi = 0.0;
    [[nodiscard]] bool contains(double t) const { return t >= lo && t <= hi; }
};

/// [center - 3T, center + 3T] for every pulse whose center lies inside [0, t_end].
std::vector<Window> pulse_windows(const PulseTrain& train, double t_end);
/// [0, t0 - 3T]; empty (hi < lo) if the first pulse starts at t = 0.
Window baseline_window(const PulseTrain& train);

/// Number of turning points of v inside the window whose swing to both
/// neighbouring turning points (or window edges) exceeds prominence.
std::size_t count_extrema(const std::vector<double>& t, const std::vector<double>& v, Window w,
                          double prominence = kExtremumProminence);

struct PulseSummary {
    std::size_t index = 0;
    Window window;
    double peak_n = 0.0;
    double t_peak_n = 0.0;
    std::optional<double> g2_at_peak;
    std::optional<double> variance_ratio_at_peak;
    std::optional<double> min_g2;
    double t_min_g2 = 0.0;
    double n_at_min_g2 = 0.0;
    /// Largest interior local maximum of g2 between the window start and the ⟨n⟩ peak.
    std::optional<double> front_g2;
    double t_front_g2 = 0.0;
    double n_at_front_g2 = 0.0;
    double max_p1 = 0.0;
    double max_p2 = 0.0;
    std::size_t p1_extrema = 0;
    std::size_t p2_extrema = 0;
};

struct SeriesSummary {
    double max_n = 0.0;
    double t_max_n = 0.0;
    std::optional<double> g2_at_max_n;
    double max_p1 = 0.0;
    double max_p2 = 0.0;
    std::optional<double> baseline_g2; ///< mean of defined g2 over the baseline window
    std::vector<PulseSummary> pulses;
};

/// Peaks and dips of a recorded series. Records need populations up to level 2.
SeriesSummary summarize_series(const std::vector<ObservableRecord>& records,
                               const PulseTrain& train);

} // namespace kerr
