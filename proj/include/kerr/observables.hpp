#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "kerr/fock.hpp"

namespace kerr {

/// g2 is reported as undefined when the mean photon number falls below this.
inline constexpr double kG2UndefinedBelow = 1e-6;

struct Populations {
    std::vector<double> values; ///< P(0..k)
    double clamped = 0.0;       ///< total magnitude removed by clamping to [0, 1]
};

struct ObservableRecord {
    double t = 0.0;
    double mean_n = 0.0;
    std::optional<double> g2;
    std::vector<double> populations;
    double variance_n = 0.0;
    double population_sum = 1.0; ///< sum of P(n) over the full basis
};

enum class PhotonStatistics { sub_poissonian, poissonian, super_poissonian };

struct VarianceCheck {
    double direct = 0.0;  ///< Tr(rho n^2) - Tr(rho n)^2
    double from_g2 = 0.0; ///< <n> + <n>^2 (g2 - 1)
    double fano = 0.0;    ///< variance / mean
    PhotonStatistics statistics = PhotonStatistics::poissonian;
};

Populations populations(const DensityMatrix& rho, std::size_t k);
double mean_photon_number(const DensityMatrix& rho);
/// Tr(rho a^dag a^dag a a) = Tr(rho n(n-1)).
double normal_ordered_second_moment(const DensityMatrix& rho);
double photon_number_variance(const DensityMatrix& rho);
std::optional<double> g2_zero_delay(const DensityMatrix& rho);
/// Ratio of moments with the same undefined guard as g2_zero_delay.
std::optional<double> g2_from_moments(double mean_n, double second_factorial_moment);

double variance_from_g2(double mean_n, double g2);
PhotonStatistics classify(double g2, double tol = 1e-12);

ObservableRecord observe(const DensityMatrix& rho, double t, std::size_t k);

/// Compares the g2 variance identity against the directly computed variance.
/// Throws ConsistencyError on a mismatch larger than tol, InvalidParameter if
/// g2 is undefined.
VarianceCheck variance_consistency(const ObservableRecord& rec, double tol = 1e-8);

} // namespace kerr
