#include "kerr/observables.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kerr/error.hpp"

namespace kerr {

namespace {

Eigen::VectorXd diagonal(const DensityMatrix& rho) { return rho.matrix().diagonal().real(); }

struct Moments {
    double total = 0.0;
    double mean = 0.0;
    double factorial2 = 0.0;
    double square = 0.0;
};

Moments moments(const DensityMatrix& rho)
{
    const Eigen::VectorXd p = diagonal(rho);
    Moments m;
    for (Eigen::Index n = 0; n < p.size(); ++n) {
        const double nd = static_cast<double>(n);
        m.total += p(n);
        m.mean += nd * p(n);
        m.factorial2 += nd * (nd - 1.0) * p(n);
        m.square += nd * nd * p(n);
    }
    return m;
}

} // namespace

Populations populations(const DensityMatrix& rho, std::size_t k)
{
    if (k >= rho.dim()) {
        throw OutOfRange("population report count " + std::to_string(k) +
                         " exceeds basis size " + std::to_string(rho.dim()));
    }
    Populations out;
    out.values.reserve(k + 1);
    for (std::size_t n = 0; n <= k; ++n) {
        const double raw = rho(n, n).real();
        const double p = std::clamp(raw, 0.0, 1.0);
        out.clamped += std::abs(raw - p);
        out.values.push_back(p);
    }
    return out;
}

double mean_photon_number(const DensityMatrix& rho) { return moments(rho).mean; }

double normal_ordered_second_moment(const DensityMatrix& rho) { return moments(rho).factorial2; }

double photon_number_variance(const DensityMatrix& rho)
{
    const Moments m = moments(rho);
    return m.square - m.mean * m.mean;
}

std::optional<double> g2_from_moments(double mean_n, double second_factorial_moment)
{
    if (mean_n < kG2UndefinedBelow) return std::nullopt;
    return second_factorial_moment / (mean_n * mean_n);
}

std::optional<double> g2_zero_delay(const DensityMatrix& rho)
{
    const Moments m = moments(rho);
    return g2_from_moments(m.mean, m.factorial2);
}

double variance_from_g2(double mean_n, double g2) { return mean_n + mean_n * mean_n * (g2 - 1.0); }

PhotonStatistics classify(double g2, double tol)
{
    if (g2 < 1.0 - tol) return PhotonStatistics::sub_poissonian;
    if (g2 > 1.0 + tol) return PhotonStatistics::super_poissonian;
    return PhotonStatistics::poissonian;
}

ObservableRecord observe(const DensityMatrix& rho, double t, std::size_t k)
{
    const Moments m = moments(rho);
    ObservableRecord rec;
    rec.t = t;
    rec.mean_n = m.mean;
    rec.g2 = g2_from_moments(m.mean, m.factorial2);
    rec.populations = populations(rho, k).values;
    rec.variance_n = m.square - m.mean * m.mean;
    rec.population_sum = m.total;
    return rec;
}

VarianceCheck variance_consistency(const ObservableRecord& rec, double tol)
{
    if (!rec.g2) throw InvalidParameter("variance check requires a defined g2");
    VarianceCheck check;
    check.direct = rec.variance_n;
    check.from_g2 = variance_from_g2(rec.mean_n, *rec.g2);
    check.fano = rec.mean_n > 0.0 ? check.direct / rec.mean_n : 0.0;
    check.statistics = classify(*rec.g2);
    if (std::abs(check.direct - check.from_g2) > tol) {
        std::ostringstream os;
        os << "variance identity violated at t=" << rec.t << ": direct " << check.direct
           << " vs g2-derived " << check.from_g2;
        throw ConsistencyError(os.str());
    }
    return check;
}

} // namespace kerr
