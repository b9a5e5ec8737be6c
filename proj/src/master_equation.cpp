#include "kerr/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kerr/error.hpp"
#include "kerr/lindblad.hpp"

namespace kerr {

namespace {

complex coherence_of(const Matrix& rho)
{
    complex alpha = 0.0;
    for (Eigen::Index m = 1; m < rho.rows(); ++m) {
        alpha += rho(m, m - 1) * std::sqrt(static_cast<double>(m));
    }
    return alpha;
}

Matrix phase_factors(const Eigen::VectorXd& energies, double h)
{
    const Eigen::Index d = energies.size();
    Matrix p(d, d);
    for (Eigen::Index n = 0; n < d; ++n) {
        for (Eigen::Index m = 0; m < d; ++m) {
            p(m, n) = std::polar(1.0, -(energies(m) - energies(n)) * h);
        }
    }
    return p;
}

class Stepper {
public:
    Stepper(const LindbladModel& model, Integrator kind, double h)
        : model_(model), kind_(kind), h_(h)
    {
        if (kind_ == Integrator::interaction_rk4) {
            full_ = phase_factors(model.energies(), h);
            half_ = phase_factors(model.energies(), 0.5 * h);
        }
    }

    void step(Matrix& rho, double t)
    {
        if (kind_ == Integrator::classical_rk4) {
            classical(rho, t);
        } else {
            interaction(rho, t);
        }
    }

private:
    void classical(Matrix& rho, double t)
    {
        const double h = h_;
        model_.apply(rho, t, k1_);
        tmp_ = rho + 0.5 * h * k1_;
        model_.apply(tmp_, t + 0.5 * h, k2_);
        tmp_ = rho + 0.5 * h * k2_;
        model_.apply(tmp_, t + 0.5 * h, k3_);
        tmp_ = rho + h * k3_;
        model_.apply(tmp_, t + h, k4_);
        rho += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    }

    void interaction(Matrix& rho, double t)
    {
        const double h = h_;
        model_.apply_coupling(rho, t, k1_);
        tmp_ = half_.cwiseProduct(rho + 0.5 * h * k1_);
        model_.apply_coupling(tmp_, t + 0.5 * h, k2_);
        base_half_ = half_.cwiseProduct(rho);
        tmp_ = base_half_ + 0.5 * h * k2_;
        model_.apply_coupling(tmp_, t + 0.5 * h, k3_);
        base_full_ = full_.cwiseProduct(rho);
        tmp_ = base_full_ + h * half_.cwiseProduct(k3_);
        model_.apply_coupling(tmp_, t + h, k4_);
        rho = base_full_ + (h / 6.0) * (full_.cwiseProduct(k1_) +
                                        2.0 * half_.cwiseProduct(k2_ + k3_) + k4_);
    }

    const LindbladModel& model_;
    Integrator kind_;
    double h_;
    Matrix full_, half_;
    Matrix k1_, k2_, k3_, k4_, tmp_, base_half_, base_full_;
};

} // namespace

void EvolutionConfig::validate(const SystemParams& p) const
{
    if (!(dt_max > 0.0) || !(dt_max <= sample_dt) || !(sample_dt <= t_end)) {
        throw InvalidParameter("evolution config requires 0 < dt_max <= sample_dt <= t_end");
    }
    if (report_levels >= p.dim) {
        throw InvalidParameter("report_levels must be below the truncation dimension");
    }
    if (initial_state) {
        if (initial_state->dim() != p.dim) {
            throw DimensionMismatch("initial state dimension " +
                                    std::to_string(initial_state->dim()) +
                                    " does not match dim " + std::to_string(p.dim));
        }
        initial_state->check();
    }
}

Matrix liouvillian_apply(const DensityMatrix& rho, double t, const SystemParams& p,
                         const PulseTrain& train)
{
    if (rho.dim() != p.dim) {
        throw DimensionMismatch("density matrix dimension " + std::to_string(rho.dim()) +
                                " does not match dim " + std::to_string(p.dim));
    }
    const LindbladModel model(p, train);
    Matrix out;
    model.apply(rho.matrix(), t, out);
    return 0.5 * (out + out.adjoint());
}

double step_cap(const EvolutionConfig& cfg, const SystemParams& p, const PulseTrain& train)
{
    const LindbladModel model(p, train);
    const double rate = cfg.integrator == Integrator::classical_rk4 ? model.full_rate_bound()
                                                                    : model.coupling_rate_bound();
    return std::min(cfg.dt_max, kStepSafety / rate);
}

StateTrajectory evolve(const EvolutionConfig& cfg, const SystemParams& p, const PulseTrain& train)
{
    p.validate();
    train.validate();
    cfg.validate(p);

    const LindbladModel model(p, train);
    const TimeGrid grid = make_grid(cfg.t_end, cfg.sample_dt, step_cap(cfg, p, train));
    const double h = grid.step();
    Stepper stepper(model, cfg.integrator, h);

    DensityMatrix rho = cfg.initial_state ? *cfg.initial_state : thermal_state(p.dim, p.n_th);

    StateTrajectory out;
    out.times.reserve(grid.samples());
    out.records.reserve(grid.samples());
    out.coherence.reserve(grid.samples());
    out.diagnostics.step = h;

    auto record = [&](std::size_t k) {
        const double t = grid.time(k);
        const double top = rho.top_population(3);
        auto& diag = out.diagnostics;
        diag.max_top_population = std::max(diag.max_top_population, top);
        if (top > cfg.truncation_tolerance) {
            std::ostringstream os;
            os << "truncation overflow at t=" << t << ": top-3 population " << top
               << " exceeds " << cfg.truncation_tolerance << " (dim=" << p.dim << ")";
            throw TruncationOverflow(os.str(), t, top);
        }
        if (cfg.check_positivity) {
            diag.min_eigenvalue = std::min(diag.min_eigenvalue, rho.min_eigenvalue());
        }
        out.times.push_back(t);
        out.records.push_back(observe(rho, t, cfg.report_levels));
        out.coherence.push_back(coherence_of(rho.matrix()));
        if (cfg.keep_states) out.states.push_back(rho);
    };

    record(0);
    for (std::size_t k = 0; k < grid.intervals; ++k) {
        const double t_start = grid.time(k);
        for (std::size_t s = 0; s < grid.substeps; ++s) {
            stepper.step(rho.matrix(), t_start + static_cast<double>(s) * h);
        }
        out.diagnostics.steps += grid.substeps;
        auto& diag = out.diagnostics;
        diag.max_trace_drift_rate =
            std::max(diag.max_trace_drift_rate, std::abs(rho.trace() - 1.0) / grid.sample_interval());
        diag.max_hermiticity_error = std::max(diag.max_hermiticity_error, rho.hermiticity_error());
        rho.renormalize();
        record(k + 1);
    }
    out.final_state = rho;
    return out;
}

} // namespace kerr
