#pragma once

#include <cstddef>
#include <vector>

#include "kerr/fock.hpp"
#include "kerr/pulse.hpp"

namespace kerr {

/// Precomputed structure of the Kerr master equation on a truncated basis.
///
/// The generator splits into a diagonal Hamiltonian part (Delta n + chi n(n-1))
/// that the integrators treat exactly and a coupling part holding the pulsed
/// drive and the dissipator. Every application is O(dim^2) on density
/// matrices and O(dim) on state vectors, exploiting the tridiagonal structure
/// of a and a^dagger.
class LindbladModel {
public:
    LindbladModel(const SystemParams& params, const PulseTrain& train);

    std::size_t dim() const noexcept { return params_.dim; }
    const SystemParams& params() const noexcept { return params_; }
    const PulseTrain& train() const noexcept { return train_; }

    /// Omega f(t).
    complex drive(double t) const;

    double rate_down() const noexcept { return rate_down_; }
    double rate_up() const noexcept { return rate_up_; }
    /// Diagonal Hamiltonian energies E_n.
    const Eigen::VectorXd& energies() const noexcept { return energies_; }
    /// Diagonal of sum_i L_i^dagger L_i.
    const Eigen::VectorXd& decay() const noexcept { return decay_; }

    /// Full right-hand side d rho / dt.
    void apply(const Matrix& rho, double t, Matrix& out) const;
    /// Right-hand side without the diagonal Hamiltonian commutator.
    void apply_coupling(const Matrix& rho, double t, Matrix& out) const;

    /// -i (drive a^dag + conj(drive) a) psi: the off-diagonal part of the
    /// non-Hermitian trajectory Hamiltonian.
    void apply_drive(const Vector& psi, double t, Vector& out) const;

    /// Jump operators L1 = sqrt((n_th+1) gamma) a, L2 = sqrt(n_th gamma) a^dag.
    std::vector<FockOperator> jump_operators() const;

    /// Largest rate in the coupling part, used for step control.
    double coupling_rate_bound() const;
    /// Largest rate including the diagonal Hamiltonian spread.
    double full_rate_bound() const;

private:
    SystemParams params_;
    PulseTrain train_;
    double rate_down_;
    double rate_up_;
    Eigen::VectorXd sqrt_n_; ///< sqrt(n), n = 0..dim
    Eigen::VectorXd energies_;
    Eigen::VectorXd decay_;
    Eigen::VectorXd up_diag_; ///< diagonal of a a^dagger on the truncated basis
};

} // namespace kerr
