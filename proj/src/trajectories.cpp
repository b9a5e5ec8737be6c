#include "kerr/trajectories.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "kerr/error.hpp"
#include "kerr/lindblad.hpp"

namespace kerr {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform double in (0, 1], portable across standard libraries.
double uniform(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53; }

constexpr double kFixedScale = 0x1.0p64;

EnsembleAccumulator::Fixed to_fixed(double x)
{
    return static_cast<EnsembleAccumulator::Fixed>(x * kFixedScale);
}

double from_fixed(EnsembleAccumulator::Fixed x)
{
    return static_cast<double>(static_cast<long double>(x) / static_cast<long double>(kFixedScale));
}

/// Integrating-factor RK4 for d psi / dt = (D - i H_drive(t)) psi with the
/// diagonal D = -i E_n - kappa_n / 2 applied exactly.
class VectorStepper {
public:
    VectorStepper(const LindbladModel& model, double h) : model_(model), h_(h)
    {
        factors(h, full_);
        factors(0.5 * h, half_);
    }

    double step_size() const noexcept { return h_; }

    void step(Vector& psi, double t) { step(psi, t, h_, full_, half_); }

    void step(Vector& psi, double t, double h)
    {
        Vector full, half;
        factors(h, full);
        factors(0.5 * h, half);
        step(psi, t, h, full, half);
    }

private:
    void factors(double h, Vector& out) const
    {
        const auto d = static_cast<Eigen::Index>(model_.dim());
        out.resize(d);
        for (Eigen::Index n = 0; n < d; ++n) {
            out(n) = std::exp(complex(-0.5 * model_.decay()(n), -model_.energies()(n)) * h);
        }
    }

    void step(Vector& psi, double t, double h, const Vector& full, const Vector& half)
    {
        model_.apply_drive(psi, t, k1_);
        tmp_ = half.cwiseProduct(psi + 0.5 * h * k1_);
        model_.apply_drive(tmp_, t + 0.5 * h, k2_);
        base_half_ = half.cwiseProduct(psi);
        tmp_ = base_half_ + 0.5 * h * k2_;
        model_.apply_drive(tmp_, t + 0.5 * h, k3_);
        base_full_ = full.cwiseProduct(psi);
        tmp_ = base_full_ + h * half.cwiseProduct(k3_);
        model_.apply_drive(tmp_, t + h, k4_);
        psi = base_full_ + (h / 6.0) * (full.cwiseProduct(k1_) + 2.0 * half.cwiseProduct(k2_ + k3_) + k4_);
    }

    const LindbladModel& model_;
    double h_;
    Vector full_, half_;
    Vector k1_, k2_, k3_, k4_, tmp_, base_half_, base_full_;
};

double trajectory_step_cap(const EvolutionConfig& cfg, const LindbladModel& model)
{
    // Decay and ladder phases are exact; only the drive limits the step.
    const double rate = std::max(std::abs(model.train().omega) * envelope_bound(model.train()),
                                 model.params().gamma);
    return std::min(cfg.dt_max, kStepSafety / rate);
}

struct Workspace {
    const LindbladModel& model;
    const TimeGrid& grid;
    const InitialStateSampler& sampler;
    std::size_t levels;
    double truncation_tolerance;
};

void record_sample(const Vector& psi, std::size_t sample, double t, const Workspace& ws,
                   TrajectoryRecord& rec)
{
    const double norm2 = psi.squaredNorm();
    const auto d = psi.size();
    double mean = 0.0, fact = 0.0, top = 0.0;
    for (Eigen::Index n = 0; n < d; ++n) {
        const double p = std::norm(psi(n)) / norm2;
        const double nd = static_cast<double>(n);
        mean += nd * p;
        fact += nd * (nd - 1.0) * p;
        if (n + 3 >= d) top += p;
    }
    if (top > ws.truncation_tolerance) {
        std::ostringstream os;
        os << "trajectory " << rec.index << " truncation overflow at t=" << t
           << ": top-3 population " << top;
        throw TruncationOverflow(os.str(), t, top);
    }
    rec.mean_n[sample] = mean;
    rec.factorial2[sample] = fact;
    for (std::size_t k = 0; k <= ws.levels; ++k) {
        rec.populations[sample * (ws.levels + 1) + k] =
            std::norm(psi(static_cast<Eigen::Index>(k))) / norm2;
    }
}

void apply_jump(Vector& psi, double t, std::mt19937_64& rng, const LindbladModel& model,
                TrajectoryRecord& rec)
{
    const auto d = psi.size();
    double down = 0.0, up = 0.0;
    for (Eigen::Index n = 0; n < d; ++n) {
        const double p = std::norm(psi(n));
        down += model.rate_down() * static_cast<double>(n) * p;
        if (n + 1 < d) up += model.rate_up() * static_cast<double>(n + 1) * p;
    }
    const double u = uniform(rng) * (down + up);
    const int channel = u <= down ? 0 : 1;
    Vector next = Vector::Zero(d);
    if (channel == 0) {
        for (Eigen::Index n = 1; n < d; ++n) next(n - 1) = std::sqrt(static_cast<double>(n)) * psi(n);
    } else {
        for (Eigen::Index n = 0; n + 1 < d; ++n) {
            next(n + 1) = std::sqrt(static_cast<double>(n + 1)) * psi(n);
        }
    }
    psi = next / next.norm();
    rec.jumps.push_back({t, channel});
}

TrajectoryRecord run_one(std::size_t index, std::uint64_t root_seed, const Workspace& ws)
{
    std::mt19937_64 rng(trajectory_seed(root_seed, index));
    TrajectoryRecord rec;
    rec.index = index;
    rec.levels = ws.levels;
    const std::size_t samples = ws.grid.samples();
    rec.mean_n.assign(samples, 0.0);
    rec.factorial2.assign(samples, 0.0);
    rec.populations.assign(samples * (ws.levels + 1), 0.0);

    rec.initial_level = ws.sampler.pick(uniform(rng) - 0x1.0p-53);
    Vector psi = ws.sampler.state(rec.initial_level);
    psi /= psi.norm();

    VectorStepper stepper(ws.model, ws.grid.step());
    const double h = ws.grid.step();
    double threshold = uniform(rng);

    record_sample(psi, 0, 0.0, ws, rec);
    for (std::size_t k = 0; k < ws.grid.intervals; ++k) {
        const double t_start = ws.grid.time(k);
        for (std::size_t s = 0; s < ws.grid.substeps; ++s) {
            double t = t_start + static_cast<double>(s) * h;
            double remaining = h;
            Vector start = psi;
            stepper.step(psi, t);
            while (psi.squaredNorm() <= threshold) {
                // Locate the crossing ||psi(t + x)||^2 = threshold by bisection,
                // re-integrating from the start of the (partial) step.
                double lo = 0.0, hi = remaining;
                for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    Vector trial = start;
                    stepper.step(trial, t, mid);
                    if (trial.squaredNorm() > threshold) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Vector at_jump = start;
                stepper.step(at_jump, t, hi);
                apply_jump(at_jump, t + hi, rng, ws.model, rec);
                threshold = uniform(rng);
                t += hi;
                remaining -= hi;
                start = at_jump;
                psi = at_jump;
                if (remaining > 0.0) stepper.step(psi, t, remaining);
            }
        }
        record_sample(psi, k + 1, ws.grid.time(k + 1), ws, rec);
    }
    return rec;
}

} // namespace

void TrajectoryConfig::validate(const SystemParams& p) const
{
    evolution.validate(p);
    if (n_traj < 1) throw InvalidParameter("n_traj must be at least 1");
}

std::uint64_t trajectory_seed(std::uint64_t root, std::uint64_t index)
{
    return splitmix64(splitmix64(root) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

InitialStateSampler::InitialStateSampler(const DensityMatrix& rho)
{
    const Matrix& m = rho.matrix();
    const auto d = m.rows();
    std::vector<double> weights;
    const Matrix off = m - Matrix(m.diagonal().asDiagonal());
    if (off.cwiseAbs().maxCoeff() == 0.0) {
        for (Eigen::Index n = 0; n < d; ++n) {
            Vector v = Vector::Zero(d);
            v(n) = 1.0;
            vectors_.push_back(std::move(v));
            weights.push_back(std::max(0.0, m(n, n).real()));
        }
    } else {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.adjoint()));
        for (Eigen::Index i = 0; i < d; ++i) {
            vectors_.push_back(solver.eigenvectors().col(i));
            // round-off sized eigenvalues of a pure or low-rank state carry no weight
            const double w = solver.eigenvalues()(i);
            weights.push_back(w > 1e-14 ? w : 0.0);
        }
    }
    double total = 0.0;
    for (double w : weights) {
        total += w;
        cumulative_.push_back(total);
    }
    if (!(total > 0.0)) throw InvalidParameter("initial state has no positive weight");
    for (double& c : cumulative_) c /= total;
    cumulative_.back() = 1.0;
}

std::size_t InitialStateSampler::pick(double u) const
{
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    auto i = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
    i = std::min(i, cumulative_.size() - 1);
    // Skip zero-weight entries that share a cumulative value.
    while (i > 0 && cumulative_[i] == cumulative_[i - 1] && u < cumulative_[i - 1]) --i;
    return i;
}

TrajectoryRecord run_trajectory(const TrajectoryConfig& cfg, std::size_t index,
                                const SystemParams& p, const PulseTrain& train,
                                const InitialStateSampler& sampler)
{
    p.validate();
    train.validate();
    const LindbladModel model(p, train);
    const TimeGrid grid =
        make_grid(cfg.evolution.t_end, cfg.evolution.sample_dt, trajectory_step_cap(cfg.evolution, model));
    const Workspace ws{model, grid, sampler, cfg.evolution.report_levels,
                       cfg.evolution.truncation_tolerance};
    return run_one(index, cfg.seed, ws);
}

TrajectoryRecord run_trajectory(const TrajectoryConfig& cfg, std::size_t index,
                                const SystemParams& p, const PulseTrain& train)
{
    cfg.validate(p);
    const DensityMatrix initial =
        cfg.evolution.initial_state ? *cfg.evolution.initial_state : thermal_state(p.dim, p.n_th);
    return run_trajectory(cfg, index, p, train, InitialStateSampler(initial));
}

EnsembleAccumulator::EnsembleAccumulator(std::size_t samples, std::size_t levels)
    : samples_(samples), levels_(levels), sums_(samples * (fields + 2 * (levels + 1)), 0),
      failures_(samples, 0)
{
}

void EnsembleAccumulator::add(const TrajectoryRecord& rec)
{
    if (rec.mean_n.size() != samples_ || rec.levels != levels_) {
        throw DimensionMismatch("trajectory record does not match accumulator shape");
    }
    for (std::size_t s = 0; s < samples_; ++s) {
        const double nv = rec.mean_n[s];
        const double fv = rec.factorial2[s];
        at(s, n) += to_fixed(nv);
        at(s, n_sq) += to_fixed(nv * nv);
        at(s, f) += to_fixed(fv);
        at(s, f_sq) += to_fixed(fv * fv);
        at(s, n_f) += to_fixed(nv * fv);
        for (std::size_t k = 0; k <= levels_; ++k) {
            const double pk = rec.population(s, k);
            at(s, fields + 2 * k) += to_fixed(pk);
            at(s, fields + 2 * k + 1) += to_fixed(pk * pk);
        }
    }
    ++count_;
}

void EnsembleAccumulator::add_failure(std::size_t first_failed_sample)
{
    for (std::size_t s = std::min(first_failed_sample, samples_); s < samples_; ++s) ++failures_[s];
}

void EnsembleAccumulator::merge(const EnsembleAccumulator& other)
{
    if (other.samples_ != samples_ || other.levels_ != levels_) {
        throw DimensionMismatch("cannot merge accumulators of different shape");
    }
    for (std::size_t i = 0; i < sums_.size(); ++i) sums_[i] += other.sums_[i];
    for (std::size_t i = 0; i < failures_.size(); ++i) failures_[i] += other.failures_[i];
    count_ += other.count_;
}

double EnsembleAccumulator::mean(std::size_t s, std::size_t field) const
{
    if (count_ == 0) return 0.0;
    return from_fixed(at(s, field)) / static_cast<double>(count_);
}

double EnsembleAccumulator::se(std::size_t s, std::size_t field, std::size_t sq_field) const
{
    if (count_ < 2) return 0.0;
    const double m = mean(s, field);
    const double m2 = mean(s, sq_field);
    const double nn = static_cast<double>(count_);
    const double var = std::max(0.0, (m2 - m * m) * nn / (nn - 1.0));
    return std::sqrt(var / nn);
}

double EnsembleAccumulator::mean_n(std::size_t s) const { return mean(s, n); }
double EnsembleAccumulator::mean_factorial2(std::size_t s) const { return mean(s, f); }
double EnsembleAccumulator::mean_population(std::size_t s, std::size_t level) const
{
    return mean(s, fields + 2 * level);
}
double EnsembleAccumulator::se_n(std::size_t s) const { return se(s, n, n_sq); }
double EnsembleAccumulator::se_factorial2(std::size_t s) const { return se(s, f, f_sq); }
double EnsembleAccumulator::se_population(std::size_t s, std::size_t level) const
{
    return se(s, fields + 2 * level, fields + 2 * level + 1);
}

double EnsembleAccumulator::cov_n_factorial2(std::size_t s) const
{
    if (count_ < 2) return 0.0;
    const double nn = static_cast<double>(count_);
    return (mean(s, n_f) - mean(s, n) * mean(s, f)) * nn / (nn - 1.0);
}

bool operator==(const EnsembleAccumulator& a, const EnsembleAccumulator& b)
{
    return a.samples_ == b.samples_ && a.levels_ == b.levels_ && a.count_ == b.count_ &&
           a.sums_ == b.sums_ && a.failures_ == b.failures_;
}

EnsembleSeries summarize(const EnsembleAccumulator& acc, const std::vector<double>& times)
{
    if (times.size() != acc.samples()) throw DimensionMismatch("time grid does not match accumulator");
    EnsembleSeries out;
    out.times = times;
    out.trajectories = acc.trajectories();
    const double count = static_cast<double>(acc.trajectories());
    for (std::size_t s = 0; s < acc.samples(); ++s) {
        ObservableRecord rec;
        rec.t = times[s];
        const double mn = acc.mean_n(s);
        const double mf = acc.mean_factorial2(s);
        rec.mean_n = mn;
        rec.g2 = g2_from_moments(mn, mf);
        rec.variance_n = mf + mn - mn * mn;
        double total = 0.0;
        std::vector<double> se_p;
        for (std::size_t k = 0; k <= acc.levels(); ++k) {
            rec.populations.push_back(acc.mean_population(s, k));
            total += rec.populations.back();
            se_p.push_back(acc.se_population(s, k));
        }
        rec.population_sum = total;
        out.se_mean_n.push_back(acc.se_n(s));
        if (rec.g2 && acc.trajectories() >= 2) {
            // Delta-method error of the ratio <n(n-1)> / <n>^2.
            const double var_n = acc.se_n(s) * acc.se_n(s) * count;
            const double var_f = acc.se_factorial2(s) * acc.se_factorial2(s) * count;
            const double cov = acc.cov_n_factorial2(s);
            const double var_g2 = (var_f / std::pow(mn, 4) + 4.0 * mf * mf * var_n / std::pow(mn, 6) -
                                   4.0 * mf * cov / std::pow(mn, 5)) /
                                  count;
            out.se_g2.emplace_back(std::sqrt(std::max(0.0, var_g2)));
        } else {
            out.se_g2.emplace_back(std::nullopt);
        }
        out.se_populations.push_back(std::move(se_p));
        out.failures.push_back(acc.failures(s));
        out.records.push_back(std::move(rec));
    }
    if (!out.failures.empty()) out.failed_trajectories = out.failures.back();
    return out;
}

EnsembleSeries ensemble_average(const TrajectoryConfig& cfg, const SystemParams& p,
                                const PulseTrain& train)
{
    p.validate();
    train.validate();
    cfg.validate(p);
    const LindbladModel model(p, train);
    const TimeGrid grid = make_grid(cfg.evolution.t_end, cfg.evolution.sample_dt,
                                    trajectory_step_cap(cfg.evolution, model));
    const DensityMatrix initial =
        cfg.evolution.initial_state ? *cfg.evolution.initial_state : thermal_state(p.dim, p.n_th);
    const InitialStateSampler sampler(initial);
    const Workspace ws{model, grid, sampler, cfg.evolution.report_levels,
                       cfg.evolution.truncation_tolerance};

    unsigned workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, cfg.n_traj));

    std::vector<EnsembleAccumulator> partial(workers, EnsembleAccumulator(grid.samples(), ws.levels));
    std::vector<std::size_t> jumps(workers, 0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&](unsigned w) {
        try {
            for (std::size_t i = next++; i < cfg.n_traj; i = next++) {
                try {
                    const TrajectoryRecord rec = run_one(i, cfg.seed, ws);
                    partial[w].add(rec);
                    jumps[w] += rec.jumps.size();
                } catch (const TruncationOverflow& e) {
                    const auto first = static_cast<std::size_t>(
                        std::ceil(e.time() / grid.sample_interval() - 1e-9));
                    partial[w].add_failure(first);
                }
            }
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    if (error) std::rethrow_exception(error);

    EnsembleAccumulator total(grid.samples(), ws.levels);
    for (const auto& acc : partial) total.merge(acc);

    std::vector<double> times(grid.samples());
    for (std::size_t k = 0; k < grid.samples(); ++k) times[k] = grid.time(k);
    EnsembleSeries out = summarize(total, times);
    for (std::size_t j : jumps) out.total_jumps += j;
    return out;
}

} // namespace kerr
