// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
// followed by the measured values, and exits non-zero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "kerr/analysis.hpp"
#include "kerr/error.hpp"
#include "kerr/master_equation.hpp"
#include "kerr/observables.hpp"
#include "kerr/oracles.hpp"
#include "kerr/scenario.hpp"
#include "kerr/trajectories.hpp"

using namespace kerr;

namespace {

// Per-pulse quantities are read from the second pulse window.
constexpr std::size_t kPulse = 1;
constexpr std::size_t kTrajectories = 5000;
constexpr std::size_t kTrajectoryDim = 30;

std::string format(const char* fmt, ...)
{
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

class Criterion {
public:
    Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}

    void expect(bool ok, const std::string& what)
    {
        ok_ = ok_ && ok;
        parts_.push_back(std::string(ok ? "ok   " : "MISS ") + what);
    }
    void note(const std::string& what) { parts_.push_back("     " + what); }

    bool report() const
    {
        std::printf("AC%d %s  %s\n", id_, ok_ ? "PASS" : "FAIL", title_.c_str());
        for (const auto& p : parts_) std::printf("      %s\n", p.c_str());
        std::fflush(stdout);
        return ok_;
    }

private:
    int id_;
    std::string title_;
    bool ok_ = true;
    std::vector<std::string> parts_;
};

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }
bool within_rel(double v, double target, double rel) { return std::abs(v - target) <= rel * std::abs(target); }
double value(const std::optional<double>& v) { return v ? *v : std::nan(""); }

struct MeRun {
    OperatingPoint op;
    StateTrajectory traj;
    SeriesSummary summary;
};

std::vector<SolverDiagnostics> g_diagnostics;

MeRun run_me(const OperatingPoint& op, double dt_max = 1e-2)
{
    EvolutionConfig cfg;
    cfg.t_end = op.t_end;
    cfg.dt_max = dt_max;
    cfg.sample_dt = 1e-2;
    MeRun r{op, evolve(cfg, op.system, op.pulses), {}};
    r.summary = summarize_series(r.traj.records, op.pulses);
    g_diagnostics.push_back(r.traj.diagnostics);
    return r;
}

OperatingPoint builtin_point(const std::string& name)
{
    return operating_points(*find_builtin(name)).front();
}

std::map<std::string, MeRun> g_runs;

const MeRun& builtin_run(const std::string& name)
{
    auto it = g_runs.find(name);
    if (it == g_runs.end()) it = g_runs.emplace(name, run_me(builtin_point(name))).first;
    return it->second;
}

const PulseSummary& pulse(const MeRun& r) { return r.summary.pulses.at(kPulse); }

// ---------------------------------------------------------------------------

bool onephoton_resonance()
{
    Criterion c(1, "one-photon resonance peaks (chi=15, Omega=6, Delta=0, n_th=0)");
    const auto& r = builtin_run("fig1-onephoton");
    const auto& s = r.summary;
    c.expect(within(s.max_p1, 0.8, 0.1), format("max P1 = %.4f (0.8 +- 0.1)", s.max_p1));
    c.expect(within(s.max_n, 0.9, 0.1), format("max <n> = %.4f (0.9 +- 0.1)", s.max_n));
    c.expect(within(value(s.g2_at_max_n), 0.12, 0.1),
             format("g2 at <n> peak = %.4f (0.12 +- 0.1)", value(s.g2_at_max_n)));
    return c.report();
}

bool twophoton_resonance()
{
    Criterion c(2, "two-photon resonance peaks (chi=30, Omega=12, Delta=-chi, n_th=0)");
    const auto& r = builtin_run("fig1-twophoton");
    const auto& s = r.summary;
    std::optional<double> ratio;
    for (const auto& p : s.pulses)
        if (p.t_peak_n == s.t_max_n) ratio = p.variance_ratio_at_peak;
    c.expect(within(s.max_p2, 0.64, 0.1), format("max P2 = %.4f (0.64 +- 0.1)", s.max_p2));
    c.expect(s.max_p2 > s.max_p1, format("max P2 > max P1 (%.4f > %.4f)", s.max_p2, s.max_p1));
    c.expect(within(s.max_p1, 0.3, 0.1), format("max P1 = %.4f (0.3 +- 0.1)", s.max_p1));
    c.expect(within_rel(s.max_n, 1.9, 0.15), format("max <n> = %.4f (1.9 +- 15%%)", s.max_n));
    c.expect(within(value(s.g2_at_max_n), 0.6, 0.1),
             format("g2 at <n> peak = %.4f (0.6 +- 0.1)", value(s.g2_at_max_n)));
    c.expect(within(value(ratio), 0.24, 0.1), format("variance / <n> at peak = %.4f (0.24 +- 0.1)", value(ratio)));
    return c.report();
}

struct Ensemble {
    OperatingPoint op;
    EnsembleSeries traj;
    StateTrajectory me;
};

std::map<std::string, Ensemble> g_ensembles;

TrajectoryConfig trajectory_config(const Scenario& s, const OperatingPoint& op)
{
    TrajectoryConfig tc;
    tc.evolution.t_end = op.t_end;
    tc.evolution.sample_dt = s.trajectories.sample_dt;
    tc.evolution.dt_max = s.trajectories.dt_max;
    tc.n_traj = kTrajectories;
    tc.seed = s.trajectories.seed;
    tc.workers = 0;
    return tc;
}

const Ensemble& ensemble(const std::string& name)
{
    auto it = g_ensembles.find(name);
    if (it != g_ensembles.end()) return it->second;
    const Scenario s = *find_builtin(name);
    OperatingPoint op = operating_points(s).front();
    op.system.dim = kTrajectoryDim;
    const auto tc = trajectory_config(s, op);
    Ensemble e{op, ensemble_average(tc, op.system, op.pulses), {}};
    EvolutionConfig me = tc.evolution;
    me.dt_max = 1e-2;
    e.me = evolve(me, op.system, op.pulses);
    g_diagnostics.push_back(e.me.diagnostics);
    return g_ensembles.emplace(name, std::move(e)).first->second;
}

bool weak_thermal_bath()
{
    Criterion c(3, "weak thermal bath (n_th=0.1) at both resonances");
    const auto& a = builtin_run("fig2-onephoton");
    const auto& d = builtin_run("fig2-twophoton");
    c.expect(a.summary.max_p1 >= 0.6 && a.summary.max_p1 <= 0.8,
             format("one-photon max P1 = %.4f (in [0.6, 0.8])", a.summary.max_p1));
    for (const auto* r : {&a, &d}) {
        const double base = value(r->summary.baseline_g2);
        c.expect(within(base, 2.0, 0.1),
                 format("chi=%g master-equation pre-pulse g2 = %.4f (2.0 +- 0.1)", r->op.system.chi, base));
    }

    for (const char* name : {"fig2-onephoton", "fig2-twophoton"}) {
        const auto& e = ensemble(name);
        const Window w = baseline_window(e.op.pulses);
        double sum = 0.0, me_sum = 0.0, se = 0.0;
        std::size_t n = 0;
        for (std::size_t k = 0; k < e.traj.records.size(); ++k) {
            const auto& r = e.traj.records[k];
            if (!w.contains(r.t) || !r.g2 || !e.me.records[k].g2 || !e.traj.se_g2[k]) continue;
            sum += *r.g2;
            me_sum += *e.me.records[k].g2;
            se += *e.traj.se_g2[k];
            ++n;
        }
        // fully correlated bins: the window mean's error is at most the mean error
        const double mean = sum / double(n), me_mean = me_sum / double(n), err = se / double(n);
        c.expect(n > 0 && std::abs(mean - me_mean) <= 3.0 * err,
                 format("chi=%g trajectory pre-pulse g2 = %.4f vs %.4f (within 3 x %.4f)",
                        e.op.system.chi, mean, me_mean, err));
    }

    const auto& pd = pulse(d);
    const double ratio_d = 1.0 + pd.n_at_front_g2 * (value(pd.front_g2) - 1.0);
    c.expect(within_rel(value(pd.front_g2), 7.0, 0.3),
             format("two-photon front g2 peak = %.4f at <n> = %.4f (7 +- 30%%)", value(pd.front_g2),
                    pd.n_at_front_g2));
    c.expect(within(pd.n_at_front_g2, 0.5, 0.1), format("front peak at <n> = %.4f (0.5 +- 0.1)", pd.n_at_front_g2));
    c.expect(within_rel(ratio_d, 4.0, 0.15), format("variance / <n> at front = %.4f (4 +- 15%%)", ratio_d));
    const auto& pa = pulse(a);
    c.expect(within(value(pa.front_g2), 0.45, 0.15),
             format("one-photon front g2 peak = %.4f at t = %.2f (0.45 +- 0.15)", value(pa.front_g2),
                    pa.t_front_g2));
    return c.report();
}

bool occupation_sweep()
{
    Criterion c(4, "max P1 falls with bath occupation (chi=15, Omega=6, Delta=0)");
    const Scenario s = *find_builtin("fig3-sweep");
    std::vector<double> p1;
    std::string row;
    for (const auto& op : operating_points(s)) {
        p1.push_back(run_me(op).summary.max_p1);
        row += format(" %.4f@%g", p1.back(), *op.sweep_value);
    }
    bool decreasing = true;
    for (std::size_t k = 1; k < p1.size(); ++k) decreasing = decreasing && p1[k] < p1[k - 1];
    c.expect(decreasing, "strictly decreasing:" + row);
    c.expect(p1.back() < 0.5 * p1.front(),
             format("P1(n_th=1.9) = %.4f < half of P1(0) = %.4f", p1.back(), 0.5 * p1.front()));
    return c.report();
}

bool moderate_thermal_bath()
{
    Criterion c(5, "one-photon resonance with n_th = 0.58 and 1.9");
    const auto& a = builtin_run("fig4a");
    const auto& hot = builtin_run("fig4c");
    const auto& pa = pulse(a);
    c.expect(within(pa.peak_n, 0.8, 0.1), format("peak <n> = %.4f (0.8 +- 0.1)", pa.peak_n));
    c.expect(within(value(pa.g2_at_peak), 0.3, 0.15),
             format("g2 at the <n> peak = %.4f (0.3 +- 0.15)", value(pa.g2_at_peak)));
    c.expect(within(value(pa.variance_ratio_at_peak), 0.56, 0.15),
             format("variance / <n> at peak = %.4f (0.56 +- 0.15)", value(pa.variance_ratio_at_peak)));
    const double depth_a = value(a.summary.baseline_g2) - value(pa.min_g2);
    const double depth_hot = value(hot.summary.baseline_g2) - value(pulse(hot).min_g2);
    c.expect(depth_hot < depth_a,
             format("g2 dip depth below baseline %.4f (n_th=1.9) < %.4f (n_th=0.58)", depth_hot, depth_a));
    return c.report();
}

bool rabi_oscillations()
{
    Criterion c(6, "oscillation extrema grow with pulse area");
    const auto& base1 = builtin_run("fig1-onephoton");
    const auto& base2 = builtin_run("fig1-twophoton");
    for (const char* name : {"fig5a", "fig6a"}) {
        const auto& r = builtin_run(name);
        c.expect(pulse(r).p1_extrema > pulse(base1).p1_extrema,
                 format("%s P1 extrema %zu > %zu", name, pulse(r).p1_extrema, pulse(base1).p1_extrema));
    }
    for (const char* name : {"fig5b", "fig6b"}) {
        const auto& r = builtin_run(name);
        c.expect(pulse(r).p2_extrema > pulse(base2).p2_extrema,
                 format("%s P2 extrema %zu > %zu", name, pulse(r).p2_extrema, pulse(base2).p2_extrema));
    }
    for (const char* name : {"fig1-onephoton", "fig5a", "fig6a"}) {
        const auto& r = builtin_run(name);
        const auto rabi = two_level_rabi_check(r.op.system, r.op.pulses);
        const double measured = 0.5 * double(pulse(r).p1_extrema);
        c.expect(std::abs(measured - rabi.cycles) <= 1.0,
                 format("%s cycles %.1f vs two-level %.2f (+- 1)", name, measured, rabi.cycles));
    }
    return c.report();
}

bool exact_values()
{
    Criterion c(7, "exact g2 values");
    const double g1 = *g2_zero_delay(fock_state(50, 1));
    const double g2 = *g2_zero_delay(fock_state(50, 2));
    c.expect(std::abs(g1) < 1e-12, format("g2(|1>) = %.3g", g1));
    c.expect(std::abs(g2 - 0.5) < 1e-12, format("g2(|2>) - 0.5 = %.3g", g2 - 0.5));
    double worst = 0.0;
    for (double n : {0.1, 0.5, 0.58, 1.0, 1.9})
        worst = std::max(worst, std::abs(*g2_zero_delay(thermal_state(50, n)) - 2.0));
    c.expect(worst < 1e-4, format("thermal g2 max |g2 - 2| = %.3g", worst));
    worst = 0.0;
    for (std::size_t m = 1; m <= 5; ++m)
        worst = std::max(worst, std::abs(*g2_zero_delay(fock_state(50, m)) - (1.0 - 1.0 / double(m))));
    c.expect(worst < 1e-12, format("max |g2(|m>) - (1 - 1/m)|, m = 1..5: %.3g", worst));
    return c.report();
}

bool solver_certification()
{
    Criterion c(8, "master-equation solver certification");

    for (const char* name : {"fig1-onephoton", "fig1-twophoton"}) {
        const auto& r = builtin_run(name);
        const MeRun half = run_me(r.op, 0.5 * r.traj.diagnostics.step);
        const double change = std::abs(half.traj.records.back().mean_n - r.traj.records.back().mean_n);
        c.expect(change < 1e-6, format("%s step %.2g -> %.2g changes <n>(t_end) by %.3g", name,
                                       r.traj.diagnostics.step, half.traj.diagnostics.step, change));
    }

    for (const char* name : {"fig1-onephoton", "fig1-twophoton"}) {
        OperatingPoint op = builtin_point(name);
        op.system.chi = 0.0;
        const MeRun r = run_me(op);
        const auto lin = linear_cavity_alpha(op.system, op.pulses, r.traj.times, 0.0, 1e-3);
        double worst = 0.0;
        for (std::size_t k = 0; k < r.traj.times.size(); ++k)
            worst = std::max(worst, std::abs(r.traj.coherence[k] - lin.alpha[k]));
        c.expect(worst < 1e-6, format("chi=0 Delta=%g: max |<a> - linear cavity| = %.3g", op.system.delta, worst));
    }

    {
        OperatingPoint op = builtin_point("fig1-onephoton");
        op.system.chi = 0.0;
        op.system.n_th = 0.58;
        const MeRun r = run_me(op);
        const auto lin = linear_cavity_alpha(op.system, op.pulses, r.traj.times, 0.0, 1e-3);
        double dn = 0.0, dg = 0.0;
        for (std::size_t k = 0; k < r.traj.times.size(); ++k) {
            const auto want = displaced_thermal_stats(lin.alpha[k], op.system.n_th);
            dn = std::max(dn, std::abs(r.traj.records[k].mean_n - want.mean_n));
            dg = std::max(dg, std::abs(value(r.traj.records[k].g2) - *want.g2));
        }
        c.expect(dn < 1e-5 && dg < 1e-5,
                 format("chi=0 n_th=0.58: max |d<n>| = %.3g, max |dg2| = %.3g", dn, dg));
    }

    {
        SystemParams p = builtin_point("fig4a").system;
        PulseTrain off = builtin_point("fig4a").pulses;
        off.omega = 0.0;
        double worst = 0.0;
        for (const auto& init : {fock_state(50, 0), coherent_state(50, complex(1.5, -0.5)), fock_state(50, 3)}) {
            EvolutionConfig cfg;
            cfg.t_end = 20.0;
            cfg.sample_dt = 0.1;
            cfg.initial_state = init;
            const auto out = evolve(cfg, p, off);
            g_diagnostics.push_back(out.diagnostics);
            const auto th = thermal_state(50, p.n_th);
            for (Eigen::Index k = 0; k < 50; ++k)
                worst = std::max(worst, std::abs(out.final_state(k, k).real() - th(k, k).real()));
        }
        c.expect(worst < 1e-6, format("drive-free populations at t=20 vs thermal: %.3g", worst));
    }

    double drift = 0.0, min_eig = 1.0;
    for (const auto& d : g_diagnostics) {
        drift = std::max(drift, d.max_trace_drift_rate);
        min_eig = std::min(min_eig, d.min_eigenvalue);
    }
    c.expect(drift < 1e-8, format("max trace drift rate over %zu runs = %.3g", g_diagnostics.size(), drift));
    c.expect(min_eig >= -1e-8, format("min eigenvalue over sampled states = %.3g", min_eig));
    return c.report();
}

bool same(const EnsembleSeries& a, const EnsembleSeries& b)
{
    if (a.records.size() != b.records.size() || a.total_jumps != b.total_jumps) return false;
    for (std::size_t k = 0; k < a.records.size(); ++k) {
        const auto& x = a.records[k];
        const auto& y = b.records[k];
        if (x.mean_n != y.mean_n || x.g2 != y.g2 || x.populations != y.populations ||
            a.se_mean_n[k] != b.se_mean_n[k] || a.se_g2[k] != b.se_g2[k])
            return false;
    }
    return true;
}

bool unraveling_equivalence()
{
    Criterion c(9, "trajectory ensemble reproduces the master equation");
    for (const char* name : {"fig1-onephoton", "fig2-onephoton", "fig2-twophoton"}) {
        const auto& e = ensemble(name);
        const double n = double(e.traj.trajectories);
        std::size_t bad_n = 0, bad_g = 0, compared_g = 0;
        double worst_n = 0.0, worst_rn = 0.0, worst_rg = 0.0;
        std::string where;
        for (std::size_t k = 0; k < e.traj.records.size(); ++k) {
            const auto& t = e.traj.records[k];
            const auto& m = e.me.records[k];
            // sampling error, plus the one-trajectory resolution for bins with no spread
            const double err_n = std::hypot(e.traj.se_mean_n[k], t.mean_n / n);
            const double dn = std::abs(t.mean_n - m.mean_n);
            worst_n = std::max(worst_n, dn);
            worst_rn = std::max(worst_rn, dn / (3.0 * err_n + 1e-6));
            if (dn > 3.0 * err_n + 1e-6) {
                ++bad_n;
                where += format(" <n>@%.1f", t.t);
            }
            if (t.g2 && m.g2 && e.traj.se_g2[k]) {
                ++compared_g;
                const double err_g = std::hypot(*e.traj.se_g2[k], *t.g2 / n);
                const double dg = std::abs(*t.g2 - *m.g2);
                worst_rg = std::max(worst_rg, dg / (3.0 * err_g + 1e-6));
                if (dg > 3.0 * err_g + 1e-6) {
                    ++bad_g;
                    where += format(" g2@%.1f(%.3f vs %.3f, se %.3f)", t.t, *t.g2, *m.g2, *e.traj.se_g2[k]);
                }
            }
        }
        c.expect(bad_n == 0, format("%s <n>: %zu of %zu samples outside the bound (max |d|/bound %.2f)", name,
                                    bad_n, e.traj.records.size(), worst_rn));
        c.expect(bad_g == 0, format("%s g2: %zu of %zu samples outside the bound (max |d|/bound %.2f)", name,
                                    bad_g, compared_g, worst_rg));
        if (!where.empty()) c.note("outside:" + where);
        // two-sided normal tail beyond 3 sigma
        c.note(format("a calibrated Gaussian error gives %.1f expected exceedances over these %zu comparisons",
                      0.0027 * double(e.traj.records.size() + compared_g), e.traj.records.size() + compared_g));
        c.expect(worst_n < 0.02, format("%s max |d<n>| = %.4f (< 0.02), %zu trajectories, %zu failed", name,
                                        worst_n, e.traj.trajectories, e.traj.failed_trajectories));
    }

    const Scenario s = *find_builtin("fig1-onephoton");
    OperatingPoint op = operating_points(s).front();
    op.system.dim = kTrajectoryDim;
    auto tc = trajectory_config(s, op);
    tc.n_traj = 300;
    tc.workers = 1;
    const auto serial = ensemble_average(tc, op.system, op.pulses);
    bool identical = true;
    for (unsigned w : {2u, 5u, 16u}) {
        tc.workers = w;
        identical = identical && same(serial, ensemble_average(tc, op.system, op.pulses));
    }
    c.expect(identical, "bitwise identical ensembles on 1, 2, 5 and 16 workers");
    return c.report();
}

} // namespace

int main()
{
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    try {
        ok = onephoton_resonance() && ok;
        ok = twophoton_resonance() && ok;
        ok = weak_thermal_bath() && ok;
        ok = occupation_sweep() && ok;
        ok = moderate_thermal_bath() && ok;
        ok = rabi_oscillations() && ok;
        ok = exact_values() && ok;
        ok = solver_certification() && ok;
        ok = unraveling_equivalence() && ok;
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 2;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("acceptance %s (%.0f s)\n", ok ? "PASSED" : "FAILED", secs);
    return ok ? 0 : 1;
}
