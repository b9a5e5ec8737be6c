#pragma once

#include <cstddef>

namespace kerr {

/// Uniform sample grid t_k = k * t_end / intervals, each sample interval split
/// into `substeps` equal integrator steps.
struct TimeGrid {
    double t_end = 0.0;
    std::size_t intervals = 0;
    std::size_t substeps = 1;

    double sample_interval() const noexcept { return t_end / static_cast<double>(intervals); }
    double step() const noexcept { return sample_interval() / static_cast<double>(substeps); }
    double time(std::size_t k) const noexcept
    {
        return k == intervals ? t_end : static_cast<double>(k) * sample_interval();
    }
    std::size_t samples() const noexcept { return intervals + 1; }
};

/// Builds the grid for the requested sampling and the largest admissible
/// integrator step. Throws StepUnderflow if the step would drop below 1e-9.
TimeGrid make_grid(double t_end, double sample_dt, double step_cap);

inline constexpr double kMinStep = 1e-9;

} // namespace kerr
