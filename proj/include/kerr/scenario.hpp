#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kerr/analysis.hpp"
#include "kerr/fock.hpp"
#include "kerr/master_equation.hpp"
#include "kerr/pulse.hpp"

namespace kerr {

inline constexpr std::string_view kVersion = "0.3.0";

enum class SolverSelect { master_equation, trajectories, both };
enum class InitialKind { thermal, vacuum };

std::string_view to_string(SolverSelect s);
SolverSelect parse_solver(std::string_view s); ///< accepts the long names and me / traj

struct SweepSpec {
    std::string parameter; ///< e.g. "system.n_th"
    std::vector<double> values;
};

struct TrajectorySettings {
    std::size_t count = 5000;
    std::uint64_t seed = 1;
    std::size_t dim = 30;
    double sample_dt = 0.1;
    double dt_max = 0.05;
    unsigned workers = 0;
};

struct Scenario {
    std::string name;
    std::string description;
    SystemParams system;
    /// When set, delta is derived as the |0> -> |n> multiphoton resonance.
    std::optional<int> resonance_order;
    PulseTrain pulses;
    double t_end = 22.0;
    double dt_max = 1e-2;
    double sample_dt = 1e-2;
    InitialKind initial = InitialKind::thermal;
    std::size_t report_levels = 5;
    SolverSelect solver = SolverSelect::master_equation;
    TrajectorySettings trajectories;
    std::optional<SweepSpec> sweep;
    std::string output_directory = "results";

    /// Throws ConfigError.
    void validate() const;
};

/// Parameter paths a sweep may address.
const std::vector<std::string>& sweepable_parameters();

/// System and pulse parameters at one sweep value (or the base point), with
/// resonance_order and a window-spanning pulse count resolved.
struct OperatingPoint {
    SystemParams system;
    PulseTrain pulses;
    double t_end = 0.0;
    std::optional<double> sweep_value;
};

std::vector<OperatingPoint> operating_points(const Scenario& s);

Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& file);
std::string to_config_text(const Scenario& s);

const std::vector<Scenario>& builtin_scenarios();
std::optional<Scenario> find_builtin(std::string_view name);

struct RunOptions {
    std::optional<SolverSelect> solver;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n_traj;
    std::optional<std::size_t> dim;
    std::optional<unsigned> workers;
    std::optional<std::filesystem::path> output_directory;
    /// Adds wall-clock times to the summary document, which then stops
    /// being reproducible byte for byte.
    bool record_timing = false;
};

struct SeriesResult {
    SolverSelect solver = SolverSelect::master_equation; ///< never `both`
    std::optional<double> sweep_value;
    std::filesystem::path table;
    SeriesSummary summary;
    std::optional<SolverDiagnostics> diagnostics; ///< master equation only
    std::size_t trajectories = 0;
    std::size_t failed_trajectories = 0;
    std::size_t jumps = 0;
    double wall_clock = 0.0;
};

struct RunSummary {
    std::string scenario;
    std::vector<SeriesResult> series;
    std::filesystem::path document;
    double wall_clock = 0.0;
};

/// Runs every (sweep value, solver) pair, writing one table and sidecar per
/// pair and one summary document. Numerical failures are rethrown with the
/// scenario and operating point prepended to the message.
RunSummary run_scenario(Scenario s, const RunOptions& opt = {});

/// Writes `content` to a temporary file beside `file` and renames it into place.
void write_atomically(const std::filesystem::path& file, std::string_view content);

} // namespace kerr
