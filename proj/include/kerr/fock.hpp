#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Core>

namespace kerr {

using complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Dense operator on the truncated number basis |0>..|dim-1>.
/// Frequencies are in units of the damping rate gamma, hbar = 1.
class FockOperator {
public:
    explicit FockOperator(Matrix entries);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    const Matrix& matrix() const noexcept { return entries_; }
    complex operator()(std::size_t row, std::size_t col) const { return entries_(row, col); }

    FockOperator adjoint() const { return FockOperator(entries_.adjoint()); }
    bool is_hermitian(double tol = 1e-12) const;

    friend FockOperator operator*(const FockOperator& lhs, const FockOperator& rhs);
    friend FockOperator operator+(const FockOperator& lhs, const FockOperator& rhs);
    friend FockOperator operator-(const FockOperator& lhs, const FockOperator& rhs);

private:
    Matrix entries_;
};

/// Reduced state of the oscillator mode. Construction does not enforce the
/// physical invariants; use check() or the individual predicates.
class DensityMatrix {
public:
    explicit DensityMatrix(Matrix entries);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    const Matrix& matrix() const noexcept { return entries_; }
    Matrix& matrix() noexcept { return entries_; }
    complex operator()(std::size_t row, std::size_t col) const { return entries_(row, col); }

    double trace() const { return entries_.trace().real(); }
    /// Largest elementwise |rho - rho^dagger|.
    double hermiticity_error() const;
    double min_eigenvalue() const;
    /// Population held by the top `levels` basis states.
    double top_population(std::size_t levels = 3) const;

    /// Throws ConsistencyError if any physical invariant is violated.
    void check(double herm_tol = 1e-10, double trace_tol = 1e-8, double eig_tol = 1e-8) const;

    /// rho <- (rho + rho^dagger) / 2, then trace rescaled to one.
    void renormalize();

private:
    Matrix entries_;
};

struct SystemParams {
    double chi = 0.0;
    double gamma = 1.0;
    double delta = 0.0;
    double n_th = 0.0;
    std::size_t dim = 50;

    /// Throws InvalidDimension / InvalidParameter.
    void validate() const;
};

FockOperator annihilation(std::size_t dim);
FockOperator creation(std::size_t dim);
FockOperator number(std::size_t dim);
FockOperator identity(std::size_t dim);

/// Rotating-frame Hamiltonian Delta n + chi n(n-1) + drive a^dag + conj(drive) a,
/// where drive is the instantaneous complex amplitude Omega f(t).
FockOperator effective_hamiltonian(const SystemParams& p, complex drive);

/// Diagonal of effective_hamiltonian at zero drive.
Eigen::VectorXd ladder_energies(const SystemParams& p);

DensityMatrix thermal_state(std::size_t dim, double n_th);
DensityMatrix fock_state(std::size_t dim, std::size_t n);
DensityMatrix coherent_state(std::size_t dim, complex alpha);
DensityMatrix pure_state(const Vector& psi);

/// Bose-Einstein occupation 1/(exp(x) - 1) for x = hbar omega / k T.
double temp_to_nth(double hbar_omega_over_kT);

} // namespace kerr
