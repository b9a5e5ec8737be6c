#include "kerr/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kerr/error.hpp"

namespace kerr {

void PulseTrain::validate() const
{
    if (!(width_T > 0.0) || !std::isfinite(width_T)) {
        throw InvalidParameter("pulse width T must be positive");
    }
    if (!(period_tau > 0.0) || !std::isfinite(period_tau)) {
        throw InvalidParameter("pulse period tau must be positive");
    }
    if (!std::isfinite(t0)) throw InvalidParameter("pulse offset t0 must be finite");
    if (count && *count == 0) throw InvalidParameter("pulse count must be positive");
    if (!std::isfinite(omega.real()) || !std::isfinite(omega.imag())) {
        throw InvalidParameter("drive amplitude must be finite");
    }
}

std::size_t PulseTrain::pulses_within(double t_end) const
{
    if (t_end < t0) return 0;
    auto n = static_cast<std::size_t>(std::floor((t_end - t0) / period_tau)) + 1;
    if (count) n = std::min(n, *count);
    return n;
}

double envelope(const PulseTrain& train, double t)
{
    const double reach = kEnvelopeCutoffWidths * train.width_T;
    const double lo = std::ceil((t - train.t0 - reach) / train.period_tau);
    const double hi = std::floor((t - train.t0 + reach) / train.period_tau);
    double first = std::max(lo, 0.0);
    double last = hi;
    if (train.count) last = std::min(last, static_cast<double>(*train.count) - 1.0);
    double f = 0.0;
    for (double n = first; n <= last; n += 1.0) {
        const double u = (t - train.t0 - n * train.period_tau) / train.width_T;
        f += std::exp(-u * u);
    }
    return f;
}

double envelope_bound(const PulseTrain& train)
{
    // Nearest pulse contributes at most one; the k-th neighbours sit at least
    // k*tau (same side) and (k - 1/2)*tau (far side) away.
    double bound = 1.0;
    for (int k = 1; k < 64; ++k) {
        const double near = k * train.period_tau / train.width_T;
        const double far = (k - 0.5) * train.period_tau / train.width_T;
        const double term = std::exp(-near * near) + std::exp(-far * far);
        bound += term;
        if (term < 1e-300) break;
    }
    if (train.count) bound = std::min(bound, static_cast<double>(*train.count));
    return bound;
}

std::size_t window_spanning_count(double t_end, double period_tau)
{
    if (!(period_tau > 0.0)) throw InvalidParameter("pulse period tau must be positive");
    return static_cast<std::size_t>(std::ceil(t_end / period_tau)) + 1;
}

double resonance_detuning(int n, double chi)
{
    if (n < 1) throw InvalidParameter("transition order must be at least 1");
    return n == 1 ? 0.0 : -chi * static_cast<double>(n - 1);
}

SelectivityReport validate_selectivity(const PulseTrain& train, const SystemParams& p)
{
    SelectivityReport report;
    const double gT = p.gamma * train.width_T;
    const double chiT = std::abs(p.chi) * train.width_T;
    const double gtau = p.gamma * train.period_tau;
    auto warn = [&](const char* what, double value, const char* rel) {
        std::ostringstream os;
        os << what << " = " << value << " " << rel;
        report.warnings.push_back(os.str());
    };
    if (!(gT < 1.0)) {
        report.shorter_than_lifetime = false;
        warn("lifetime: gamma*T", gT, ">= 1, pulses outlast the photon lifetime");
    }
    if (!(chiT > 1.0)) {
        report.spectrally_resolved = false;
        warn("selectivity: chi*T", chiT, "<= 1, pulse bandwidth exceeds the Kerr shift");
    }
    if (!(gtau > 1.0)) {
        report.separated = false;
        warn("separation: gamma*tau", gtau, "<= 1, pulses arrive within one photon lifetime");
    }
    return report;
}

} // namespace kerr
