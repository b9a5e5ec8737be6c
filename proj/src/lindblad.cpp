#include "kerr/lindblad.hpp"

#include <algorithm>
#include <cmath>

namespace kerr {

LindbladModel::LindbladModel(const SystemParams& params, const PulseTrain& train)
    : params_(params), train_(train)
{
    params_.validate();
    train_.validate();
    rate_down_ = params_.gamma * (params_.n_th + 1.0);
    rate_up_ = params_.gamma * params_.n_th;

    const auto d = static_cast<Eigen::Index>(params_.dim);
    sqrt_n_.resize(d + 1);
    for (Eigen::Index n = 0; n <= d; ++n) sqrt_n_(n) = std::sqrt(static_cast<double>(n));

    energies_ = ladder_energies(params_);
    up_diag_.resize(d);
    decay_.resize(d);
    for (Eigen::Index n = 0; n < d; ++n) {
        // a a^dagger loses its last entry to the truncation.
        up_diag_(n) = n + 1 < d ? static_cast<double>(n + 1) : 0.0;
        decay_(n) = rate_down_ * static_cast<double>(n) + rate_up_ * up_diag_(n);
    }
}

complex LindbladModel::drive(double t) const { return train_.omega * envelope(train_, t); }

void LindbladModel::apply_coupling(const Matrix& rho, double t, Matrix& out) const
{
    const complex c = drive(t);
    const complex cc = std::conj(c);
    const complex minus_i(0.0, -1.0);
    const Eigen::Index d = rho.rows();
    out.resize(d, d);
    const double* s = sqrt_n_.data();
    for (Eigen::Index n = 0; n < d; ++n) {
        for (Eigen::Index m = 0; m < d; ++m) {
            // -i [c a^dag + c* a, rho]
            complex comm = 0.0;
            if (m > 0) comm += c * s[m] * rho(m - 1, n);
            if (m + 1 < d) comm += cc * s[m + 1] * rho(m + 1, n);
            if (n + 1 < d) comm -= c * s[n + 1] * rho(m, n + 1);
            if (n > 0) comm -= cc * s[n] * rho(m, n - 1);
            complex v = minus_i * comm;

            // L rho L^dag - (L^dag L rho + rho L^dag L) / 2 for both channels.
            if (m + 1 < d && n + 1 < d) v += rate_down_ * s[m + 1] * s[n + 1] * rho(m + 1, n + 1);
            if (m > 0 && n > 0) v += rate_up_ * s[m] * s[n] * rho(m - 1, n - 1);
            v -= 0.5 * (decay_(m) + decay_(n)) * rho(m, n);
            out(m, n) = v;
        }
    }
}

void LindbladModel::apply(const Matrix& rho, double t, Matrix& out) const
{
    apply_coupling(rho, t, out);
    const complex minus_i(0.0, -1.0);
    const Eigen::Index d = rho.rows();
    for (Eigen::Index n = 0; n < d; ++n) {
        for (Eigen::Index m = 0; m < d; ++m) {
            out(m, n) += minus_i * (energies_(m) - energies_(n)) * rho(m, n);
        }
    }
}

void LindbladModel::apply_drive(const Vector& psi, double t, Vector& out) const
{
    const complex c = drive(t);
    const complex cc = std::conj(c);
    const complex minus_i(0.0, -1.0);
    const Eigen::Index d = psi.size();
    out.resize(d);
    const double* s = sqrt_n_.data();
    for (Eigen::Index m = 0; m < d; ++m) {
        complex v = 0.0;
        if (m > 0) v += c * s[m] * psi(m - 1);
        if (m + 1 < d) v += cc * s[m + 1] * psi(m + 1);
        out(m) = minus_i * v;
    }
}

std::vector<FockOperator> LindbladModel::jump_operators() const
{
    const FockOperator a = annihilation(params_.dim);
    return {FockOperator(std::sqrt(rate_down_) * a.matrix()),
            FockOperator(std::sqrt(rate_up_) * a.adjoint().matrix())};
}

double LindbladModel::coupling_rate_bound() const
{
    // ||Omega f a^dag|| on the truncated basis
    const double drive = std::abs(train_.omega) * envelope_bound(train_) *
                         std::sqrt(static_cast<double>(params_.dim - 1));
    const double dissipation = rate_down_ * static_cast<double>(params_.dim);
    return std::max(drive, dissipation);
}

double LindbladModel::full_rate_bound() const
{
    const double d = static_cast<double>(params_.dim);
    return std::max(coupling_rate_bound(), std::abs(params_.delta) + std::abs(params_.chi) * d * d);
}

} // namespace kerr
