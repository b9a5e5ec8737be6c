#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "kerr/fock.hpp"
#include "kerr/master_equation.hpp"
#include "kerr/observables.hpp"
#include "kerr/pulse.hpp"

namespace kerr {

struct TrajectoryConfig {
    EvolutionConfig evolution;
    std::size_t n_traj = 1000;
    std::uint64_t seed = 1;
    /// 0 selects std::thread::hardware_concurrency().
    unsigned workers = 0;

    void validate(const SystemParams& p) const;
};

/// Independent 64-bit seed for trajectory `index`; a pure function of its
/// arguments so a trajectory's stream does not depend on which others ran.
std::uint64_t trajectory_seed(std::uint64_t root, std::uint64_t index);

struct QuantumJump {
    double t = 0.0;
    int channel = 0; ///< 0: emission (a), 1: absorption (a^dagger)
};

/// Pure-state expectation values on the sample grid.
struct TrajectoryRecord {
    std::size_t index = 0;
    std::size_t levels = 0; ///< populations per sample = levels + 1
    std::vector<double> mean_n;
    std::vector<double> factorial2; ///< <n(n-1)>
    std::vector<double> populations; ///< row-major [sample][level]
    std::vector<QuantumJump> jumps;
    std::size_t initial_level = 0; ///< eigenvector drawn from the initial state

    double population(std::size_t sample, std::size_t level) const
    {
        return populations[sample * (levels + 1) + level];
    }
};

/// Draws pure initial states from a density matrix's eigendecomposition.
class InitialStateSampler {
public:
    explicit InitialStateSampler(const DensityMatrix& rho);

    /// Returns the index of the chosen eigenvector for a uniform u in [0, 1).
    std::size_t pick(double u) const;
    const Vector& state(std::size_t i) const { return vectors_[i]; }
    std::size_t size() const noexcept { return vectors_.size(); }

private:
    std::vector<Vector> vectors_;
    std::vector<double> cumulative_;
};

TrajectoryRecord run_trajectory(const TrajectoryConfig& cfg, std::size_t index,
                                const SystemParams& p, const PulseTrain& train);

TrajectoryRecord run_trajectory(const TrajectoryConfig& cfg, std::size_t index,
                                const SystemParams& p, const PulseTrain& train,
                                const InitialStateSampler& sampler);

/// Per-bin running sums, held in 128-bit fixed point so that adding records
/// and merging accumulators is exactly associative and commutative.
class EnsembleAccumulator {
public:
    __extension__ typedef __int128 Fixed;

    EnsembleAccumulator(std::size_t samples, std::size_t levels);

    void add(const TrajectoryRecord& rec);
    void add_failure(std::size_t first_failed_sample);
    void merge(const EnsembleAccumulator& other);

    std::size_t samples() const noexcept { return samples_; }
    std::size_t levels() const noexcept { return levels_; }
    std::size_t trajectories() const noexcept { return count_; }
    std::size_t failures(std::size_t sample) const { return failures_[sample]; }

    double mean_n(std::size_t s) const;
    double mean_factorial2(std::size_t s) const;
    double mean_population(std::size_t s, std::size_t level) const;
    double se_n(std::size_t s) const;
    double se_factorial2(std::size_t s) const;
    double se_population(std::size_t s, std::size_t level) const;
    /// Sample covariance of the per-trajectory <n> and <n(n-1)>.
    double cov_n_factorial2(std::size_t s) const;

    friend bool operator==(const EnsembleAccumulator& a, const EnsembleAccumulator& b);

private:
    enum Field { n = 0, n_sq, f, f_sq, n_f, fields };
    std::size_t stride() const noexcept { return fields + 2 * (levels_ + 1); }
    Fixed& at(std::size_t s, std::size_t field) { return sums_[s * stride() + field]; }
    const Fixed& at(std::size_t s, std::size_t field) const { return sums_[s * stride() + field]; }
    double mean(std::size_t s, std::size_t field) const;
    double se(std::size_t s, std::size_t field, std::size_t sq_field) const;

    std::size_t samples_;
    std::size_t levels_;
    std::size_t count_ = 0;
    std::vector<Fixed> sums_;
    std::vector<std::size_t> failures_;
};

struct EnsembleSeries {
    std::vector<double> times;
    std::vector<ObservableRecord> records; ///< ensemble means
    std::vector<double> se_mean_n;
    std::vector<std::optional<double>> se_g2;
    std::vector<std::vector<double>> se_populations;
    std::vector<std::size_t> failures; ///< failed trajectories per bin
    std::size_t trajectories = 0;
    std::size_t failed_trajectories = 0;
    std::size_t total_jumps = 0;
};

/// Builds the series from an accumulator; g2 is formed from ensemble moments.
EnsembleSeries summarize(const EnsembleAccumulator& acc, const std::vector<double>& times);

/// Runs cfg.n_traj trajectories on cfg.workers threads. The result is
/// bitwise independent of the worker count and scheduling.
EnsembleSeries ensemble_average(const TrajectoryConfig& cfg, const SystemParams& p,
                                const PulseTrain& train);

} // namespace kerr
