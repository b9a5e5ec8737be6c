#include "kerr/grid.hpp"

#include <cmath>
#include <sstream>

#include "kerr/error.hpp"

namespace kerr {

TimeGrid make_grid(double t_end, double sample_dt, double step_cap)
{
    if (!(t_end > 0.0) || !(sample_dt > 0.0) || sample_dt > t_end) {
        throw InvalidParameter("sample grid requires 0 < sample_dt <= t_end");
    }
    if (!(step_cap >= kMinStep)) {
        std::ostringstream os;
        os << "integrator step " << step_cap << " below minimum " << kMinStep;
        throw StepUnderflow(os.str());
    }
    TimeGrid grid;
    grid.t_end = t_end;
    grid.intervals = static_cast<std::size_t>(std::ceil(t_end / sample_dt - 1e-9));
    if (grid.intervals == 0) grid.intervals = 1;
    grid.substeps = static_cast<std::size_t>(std::ceil(grid.sample_interval() / step_cap - 1e-9));
    if (grid.substeps == 0) grid.substeps = 1;
    return grid;
}

} // namespace kerr
