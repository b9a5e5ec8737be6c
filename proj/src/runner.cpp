#include <chrono>
#include <cstdio>
#include <fstream>
#include <string>
#include <system_error>

#include <json.hpp>

#include "kerr/error.hpp"
#include "kerr/oracles.hpp"
#include "kerr/scenario.hpp"
#include "kerr/trajectories.hpp"

namespace kerr {

using nlohmann::json;
namespace fs = std::filesystem;

void write_atomically(const fs::path& file, std::string_view content)
{
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    fs::path tmp = file;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error("short write on " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, file, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string short_name(SolverSelect s) { return s == SolverSelect::trajectories ? "traj" : "me"; }

std::string stem(const Scenario& s, const OperatingPoint& op, SolverSelect solver)
{
    std::string out = s.name;
    if (op.sweep_value) {
        const auto& path = s.sweep->parameter;
        out += "." + path.substr(path.find('.') + 1) + "-" + num(*op.sweep_value);
    }
    return out + "." + short_name(solver);
}

std::string table_text(const std::vector<ObservableRecord>& rec, std::size_t levels,
                       const PulseTrain& train, const EnsembleSeries* ens)
{
    std::string out = "t,mean_n,g2";
    for (std::size_t k = 0; k <= levels; ++k) out += ",P" + std::to_string(k);
    out += ",variance_n,envelope";
    if (ens) out += ",se_mean_n,se_g2";
    out += '\n';
    for (std::size_t i = 0; i < rec.size(); ++i) {
        const auto& r = rec[i];
        out += num(r.t) + ',' + num(r.mean_n) + ',' + (r.g2 ? num(*r.g2) : std::string());
        for (std::size_t k = 0; k <= levels; ++k) out += ',' + num(r.populations[k]);
        out += ',' + num(r.variance_n) + ',' + num(envelope(train, r.t));
        if (ens) {
            out += ',' + num(ens->se_mean_n[i]) + ',';
            if (ens->se_g2[i]) out += num(*ens->se_g2[i]);
        }
        out += '\n';
    }
    return out;
}

json params_json(const OperatingPoint& op)
{
    return {
        {"system",
         {{"chi", op.system.chi}, {"gamma", op.system.gamma}, {"delta", op.system.delta},
          {"n_th", op.system.n_th}, {"dim", op.system.dim}}},
        {"pulses",
         {{"omega", json::array({op.pulses.omega.real(), op.pulses.omega.imag()})},
          {"T", op.pulses.width_T}, {"tau", op.pulses.period_tau}, {"t0", op.pulses.t0},
          {"count", op.pulses.count ? json(*op.pulses.count) : json(nullptr)}}},
        {"t_end", op.t_end},
    };
}

json windows_json(const PulseTrain& train)
{
    const Window base = baseline_window(train);
    return {{"pulse", "[center - 3T, center + 3T]"},
            {"baseline", json::array({base.lo, base.hi})},
            {"extremum_prominence", kExtremumProminence},
            {"front_peak", "largest interior local maximum of g2 before the window's <n> peak"}};
}

json summary_json(const SeriesSummary& s)
{
    json pulses = json::array();
    for (const auto& p : s.pulses) {
        pulses.push_back({
            {"index", p.index},
            {"window", json::array({p.window.lo, p.window.hi})},
            {"peak_n", p.peak_n},
            {"t_peak_n", p.t_peak_n},
            {"g2_at_peak", opt(p.g2_at_peak)},
            {"variance_ratio_at_peak", opt(p.variance_ratio_at_peak)},
            {"min_g2", opt(p.min_g2)},
            {"t_min_g2", p.t_min_g2},
            {"n_at_min_g2", p.n_at_min_g2},
            {"front_g2", opt(p.front_g2)},
            {"t_front_g2", p.t_front_g2},
            {"n_at_front_g2", p.n_at_front_g2},
            {"max_p1", p.max_p1},
            {"max_p2", p.max_p2},
            {"p1_extrema", p.p1_extrema},
            {"p2_extrema", p.p2_extrema},
        });
    }
    return {{"max_n", s.max_n},         {"t_max_n", s.t_max_n}, {"g2_at_max_n", opt(s.g2_at_max_n)},
            {"max_p1", s.max_p1},       {"max_p2", s.max_p2},   {"baseline_g2", opt(s.baseline_g2)},
            {"pulses", pulses}};
}

std::string context(const Scenario& s, const OperatingPoint& op, SolverSelect solver)
{
    std::string out = "scenario '" + s.name + "'";
    if (op.sweep_value) out += " at " + s.sweep->parameter + " = " + num(*op.sweep_value);
    return out + " (" + std::string(to_string(solver)) + "): ";
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

RunSummary run_scenario(Scenario s, const RunOptions& opt)
{
    if (opt.solver) s.solver = *opt.solver;
    if (opt.seed) s.trajectories.seed = *opt.seed;
    if (opt.n_traj) s.trajectories.count = *opt.n_traj;
    if (opt.workers) s.trajectories.workers = *opt.workers;
    if (opt.dim) {
        s.system.dim = *opt.dim;
        s.trajectories.dim = *opt.dim;
    }
    s.validate();
    const fs::path dir = opt.output_directory ? *opt.output_directory : fs::path(s.output_directory);

    std::vector<SolverSelect> solvers;
    if (s.solver != SolverSelect::trajectories) solvers.push_back(SolverSelect::master_equation);
    if (s.solver != SolverSelect::master_equation) solvers.push_back(SolverSelect::trajectories);

    const auto run_start = std::chrono::steady_clock::now();
    RunSummary summary;
    summary.scenario = s.name;
    json series_doc = json::array();

    for (const auto& op : operating_points(s)) {
        for (SolverSelect solver : solvers) {
            const auto start = std::chrono::steady_clock::now();
            SeriesResult res;
            res.solver = solver;
            res.sweep_value = op.sweep_value;
            SystemParams sys = op.system;
            EvolutionConfig ev;
            ev.t_end = op.t_end;
            ev.report_levels = s.report_levels;
            if (solver == SolverSelect::master_equation) {
                ev.dt_max = s.dt_max;
                ev.sample_dt = s.sample_dt;
            } else {
                sys.dim = s.trajectories.dim;
                ev.dt_max = s.trajectories.dt_max;
                ev.sample_dt = s.trajectories.sample_dt;
            }
            if (s.initial == InitialKind::vacuum) ev.initial_state = fock_state(sys.dim, 0);

            std::string table;
            json meta = {{"scenario", s.name},
                         {"description", s.description},
                         {"code_version", std::string(kVersion)},
                         {"units", "gamma (hbar = gamma = 1)"},
                         {"solver", std::string(to_string(solver))},
                         {"sweep_parameter", s.sweep ? json(s.sweep->parameter) : json(nullptr)},
                         {"sweep_value", kerr::opt(op.sweep_value)},
                         {"parameters", params_json(op)},
                         {"initial_state", s.initial == InitialKind::thermal ? "thermal" : "vacuum"},
                         {"dt_max", ev.dt_max},
                         {"sample_dt", ev.sample_dt},
                         {"g2_undefined_below", kG2UndefinedBelow},
                         {"windows", windows_json(op.pulses)}};
            meta["parameters"]["system"]["dim"] = sys.dim;

            try {
                if (solver == SolverSelect::master_equation) {
                    const auto traj = evolve(ev, sys, op.pulses);
                    res.summary = summarize_series(traj.records, op.pulses);
                    res.diagnostics = traj.diagnostics;
                    table = table_text(traj.records, s.report_levels, op.pulses, nullptr);
                    const auto& d = traj.diagnostics;
                    meta["diagnostics"] = {{"step", d.step},
                                           {"steps", d.steps},
                                           {"max_trace_drift_rate", d.max_trace_drift_rate},
                                           {"min_eigenvalue", d.min_eigenvalue},
                                           {"max_top_population", d.max_top_population},
                                           {"max_hermiticity_error", d.max_hermiticity_error}};
                } else {
                    TrajectoryConfig tc;
                    tc.evolution = ev;
                    tc.n_traj = s.trajectories.count;
                    tc.seed = s.trajectories.seed;
                    tc.workers = s.trajectories.workers;
                    const auto ens = ensemble_average(tc, sys, op.pulses);
                    res.summary = summarize_series(ens.records, op.pulses);
                    res.trajectories = ens.trajectories;
                    res.failed_trajectories = ens.failed_trajectories;
                    res.jumps = ens.total_jumps;
                    table = table_text(ens.records, s.report_levels, op.pulses, &ens);
                    meta["seed"] = tc.seed;
                    meta["trajectories"] = {{"count", tc.n_traj},
                                            {"failed", ens.failed_trajectories},
                                            {"jumps", ens.total_jumps},
                                            {"unraveling", "quantum jumps"}};
                }
            } catch (const TruncationOverflow& e) {
                throw TruncationOverflow(context(s, op, solver) + e.what(), e.time(), e.top_population());
            } catch (const NumericalError& e) {
                throw NumericalError(context(s, op, solver) + e.what());
            }

            json warnings = json::array();
            for (const auto& w : validate_selectivity(op.pulses, sys).warnings) warnings.push_back(w);
            meta["selectivity_warnings"] = warnings;

            const std::string base = stem(s, op, solver);
            res.table = dir / (base + ".csv");
            write_atomically(res.table, table);
            write_atomically(dir / (base + ".meta.json"), meta.dump(2) + "\n");
            res.wall_clock = seconds_since(start);

            json entry = {{"solver", std::string(to_string(solver))},
                          {"sweep_value", kerr::opt(op.sweep_value)},
                          {"table", res.table.filename().string()},
                          {"summary", summary_json(res.summary)},
                          {"selectivity_warnings", warnings}};
            if (op.system.delta == 0.0) {
                const auto rabi = two_level_rabi_check(op.system, op.pulses);
                entry["rabi_prediction"] = {{"pulse_area", rabi.pulse_area}, {"cycles", rabi.cycles}};
            }
            if (res.diagnostics) entry["diagnostics"] = meta["diagnostics"];
            else entry["trajectories"] = meta["trajectories"];
            if (opt.record_timing) entry["wall_clock_s"] = res.wall_clock;
            series_doc.push_back(entry);
            summary.series.push_back(std::move(res));
        }
    }

    summary.wall_clock = seconds_since(run_start);
    json doc = {{"scenario", s.name},
                {"code_version", std::string(kVersion)},
                {"windows", windows_json(s.pulses)},
                {"series", series_doc}};
    if (opt.record_timing) doc["wall_clock_s"] = summary.wall_clock;
    summary.document = dir / (s.name + ".summary.json");
    write_atomically(summary.document, doc.dump(2) + "\n");
    return summary;
}

} // namespace kerr
