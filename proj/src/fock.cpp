#include "kerr/fock.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "kerr/error.hpp"

namespace kerr {

namespace {

void require_dim(std::size_t dim)
{
    if (dim < 2) {
        throw InvalidDimension("truncation dimension must be at least 2, got " +
                               std::to_string(dim));
    }
}

Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

} // namespace

FockOperator::FockOperator(Matrix entries) : entries_(std::move(entries))
{
    if (entries_.rows() != entries_.cols()) {
        throw DimensionMismatch("operator matrix must be square");
    }
}

bool FockOperator::is_hermitian(double tol) const
{
    return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() < tol;
}

FockOperator operator*(const FockOperator& lhs, const FockOperator& rhs)
{
    if (lhs.dim() != rhs.dim()) throw DimensionMismatch("operator product dimension mismatch");
    return FockOperator(lhs.entries_ * rhs.entries_);
}

FockOperator operator+(const FockOperator& lhs, const FockOperator& rhs)
{
    if (lhs.dim() != rhs.dim()) throw DimensionMismatch("operator sum dimension mismatch");
    return FockOperator(lhs.entries_ + rhs.entries_);
}

FockOperator operator-(const FockOperator& lhs, const FockOperator& rhs)
{
    if (lhs.dim() != rhs.dim()) throw DimensionMismatch("operator difference dimension mismatch");
    return FockOperator(lhs.entries_ - rhs.entries_);
}

DensityMatrix::DensityMatrix(Matrix entries) : entries_(std::move(entries))
{
    if (entries_.rows() != entries_.cols()) {
        throw DimensionMismatch("density matrix must be square");
    }
}

double DensityMatrix::hermiticity_error() const
{
    return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const
{
    const Matrix herm = 0.5 * (entries_ + entries_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double DensityMatrix::top_population(std::size_t levels) const
{
    const std::size_t d = dim();
    const std::size_t first = levels >= d ? 0 : d - levels;
    double sum = 0.0;
    for (std::size_t n = first; n < d; ++n) sum += entries_(idx(n), idx(n)).real();
    return sum;
}

void DensityMatrix::check(double herm_tol, double trace_tol, double eig_tol) const
{
    std::ostringstream msg;
    if (const double h = hermiticity_error(); h > herm_tol) {
        msg << "density matrix not Hermitian (max deviation " << h << ")";
        throw ConsistencyError(msg.str());
    }
    if (const double tr = trace(); std::abs(tr - 1.0) > trace_tol) {
        msg << "density matrix trace " << tr << " differs from one";
        throw ConsistencyError(msg.str());
    }
    if (const double e = min_eigenvalue(); e < -eig_tol) {
        msg << "density matrix has negative eigenvalue " << e;
        throw ConsistencyError(msg.str());
    }
}

void DensityMatrix::renormalize()
{
    entries_ = 0.5 * (entries_ + entries_.adjoint()).eval();
    entries_ /= entries_.trace().real();
}

void SystemParams::validate() const
{
    require_dim(dim);
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw InvalidParameter("gamma must be positive and finite");
    }
    if (!(n_th >= 0.0) || !std::isfinite(n_th)) {
        throw InvalidParameter("n_th must be non-negative and finite");
    }
    if (!std::isfinite(chi) || !std::isfinite(delta)) {
        throw InvalidParameter("chi and delta must be finite");
    }
}

FockOperator annihilation(std::size_t dim)
{
    require_dim(dim);
    Matrix a = Matrix::Zero(idx(dim), idx(dim));
    for (std::size_t n = 1; n < dim; ++n) {
        a(idx(n - 1), idx(n)) = std::sqrt(static_cast<double>(n));
    }
    return FockOperator(std::move(a));
}

FockOperator creation(std::size_t dim) { return annihilation(dim).adjoint(); }

FockOperator number(std::size_t dim)
{
    require_dim(dim);
    Eigen::VectorXd diag = Eigen::VectorXd::LinSpaced(idx(dim), 0.0, static_cast<double>(dim - 1));
    return FockOperator(diag.cast<complex>().asDiagonal());
}

FockOperator identity(std::size_t dim)
{
    require_dim(dim);
    return FockOperator(Matrix::Identity(idx(dim), idx(dim)));
}

Eigen::VectorXd ladder_energies(const SystemParams& p)
{
    p.validate();
    Eigen::VectorXd e(idx(p.dim));
    for (std::size_t n = 0; n < p.dim; ++n) {
        const double nd = static_cast<double>(n);
        e(idx(n)) = p.delta * nd + p.chi * nd * (nd - 1.0);
    }
    return e;
}

FockOperator effective_hamiltonian(const SystemParams& p, complex drive)
{
    if (!std::isfinite(drive.real()) || !std::isfinite(drive.imag())) {
        throw InvalidParameter("drive amplitude must be finite");
    }
    Matrix h = ladder_energies(p).cast<complex>().asDiagonal();
    for (std::size_t n = 1; n < p.dim; ++n) {
        const double s = std::sqrt(static_cast<double>(n));
        h(idx(n), idx(n - 1)) = drive * s;            // a^dagger
        h(idx(n - 1), idx(n)) = std::conj(drive) * s; // a
    }
    return FockOperator(std::move(h));
}

DensityMatrix thermal_state(std::size_t dim, double n_th)
{
    require_dim(dim);
    if (!(n_th >= 0.0) || !std::isfinite(n_th)) {
        throw InvalidParameter("n_th must be non-negative and finite");
    }
    const double ratio = n_th / (1.0 + n_th);
    Eigen::VectorXd p(idx(dim));
    double weight = 1.0;
    for (std::size_t n = 0; n < dim; ++n) {
        p(idx(n)) = weight;
        weight *= ratio;
    }
    p /= p.sum();
    return DensityMatrix(p.cast<complex>().asDiagonal());
}

DensityMatrix fock_state(std::size_t dim, std::size_t n)
{
    require_dim(dim);
    if (n >= dim) {
        throw OutOfRange("Fock level " + std::to_string(n) + " outside basis of size " +
                         std::to_string(dim));
    }
    Matrix rho = Matrix::Zero(idx(dim), idx(dim));
    rho(idx(n), idx(n)) = 1.0;
    return DensityMatrix(std::move(rho));
}

DensityMatrix pure_state(const Vector& psi)
{
    const double norm2 = psi.squaredNorm();
    if (!(norm2 > 0.0)) throw InvalidParameter("state vector has zero norm");
    return DensityMatrix(psi * psi.adjoint() / norm2);
}

DensityMatrix coherent_state(std::size_t dim, complex alpha)
{
    require_dim(dim);
    Vector psi(idx(dim));
    psi(0) = 1.0;
    for (std::size_t n = 1; n < dim; ++n) {
        psi(idx(n)) = psi(idx(n - 1)) * alpha / std::sqrt(static_cast<double>(n));
    }
    return pure_state(psi);
}

double temp_to_nth(double hbar_omega_over_kT)
{
    if (!(hbar_omega_over_kT > 0.0)) {
        throw InvalidParameter("hbar omega / k T must be positive");
    }
    return 1.0 / std::expm1(hbar_omega_over_kT);
}

} // namespace kerr
