#include "kerr/oracles.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "kerr/error.hpp"

namespace kerr {

namespace {

// 5-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 5> kNodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                       0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kWeights{0.2369268850561891, 0.4786286704993665,
                                         0.5688888888888889, 0.4786286704993665,
                                         0.2369268850561891};

} // namespace

LinearCavitySolution linear_cavity_alpha(const SystemParams& p, const PulseTrain& train,
                                         const std::vector<double>& times, complex alpha0,
                                         double max_panel)
{
    if (p.chi != 0.0) throw InvalidParameter("linear cavity oracle requires chi = 0");
    if (!(max_panel > 0.0)) throw InvalidParameter("quadrature panel must be positive");
    train.validate();

    const complex rate(0.5 * p.gamma, p.delta); // i Delta + gamma / 2
    const complex minus_i_omega = complex(0.0, -1.0) * train.omega;

    LinearCavitySolution out;
    out.n_th = p.n_th;
    out.times = times;
    out.alpha.reserve(times.size());

    double t = 0.0;
    complex alpha = alpha0;
    for (double target : times) {
        if (target < t) throw InvalidParameter("oracle time grid must be sorted and non-negative");
        const auto panels = static_cast<std::size_t>(std::ceil((target - t) / max_panel));
        const double width = panels ? (target - t) / static_cast<double>(panels) : 0.0;
        for (std::size_t k = 0; k < panels; ++k) {
            const double a = t + static_cast<double>(k) * width;
            const double b = a + width;
            // alpha(b) = e^{-rate w} alpha(a) - i Omega int_a^b e^{-rate (b - s)} f(s) ds
            complex integral = 0.0;
            for (std::size_t q = 0; q < kNodes.size(); ++q) {
                const double s = 0.5 * (a + b) + 0.5 * width * kNodes[q];
                integral += kWeights[q] * std::exp(-rate * (b - s)) * envelope(train, s);
            }
            integral *= 0.5 * width;
            alpha = std::exp(-rate * width) * alpha + minus_i_omega * integral;
        }
        t = target;
        out.alpha.push_back(alpha);
    }
    return out;
}

DisplacedThermalStats displaced_thermal_stats(complex alpha, double n_th)
{
    if (!(n_th >= 0.0)) throw InvalidParameter("n_th must be non-negative");
    const double coherent = std::norm(alpha);
    DisplacedThermalStats out;
    out.mean_n = coherent + n_th;
    if (out.mean_n > 0.0) {
        out.g2 = 1.0 + (n_th * n_th + 2.0 * n_th * coherent) / (out.mean_n * out.mean_n);
    }
    return out;
}

RabiPrediction two_level_rabi_check(const SystemParams& p, const PulseTrain& train)
{
    if (p.delta != 0.0) throw InvalidParameter("two-level Rabi estimate requires Delta = 0");
    train.validate();
    RabiPrediction out;
    out.pulse_area = 2.0 * std::abs(train.omega) * train.width_T * std::sqrt(std::numbers::pi);
    out.cycles = out.pulse_area / (2.0 * std::numbers::pi);
    out.strongly_selective = std::abs(p.chi) * train.width_T > 1.0;
    return out;
}

} // namespace kerr
