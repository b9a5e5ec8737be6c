// Command-line front end: run scenarios, list and export the builtins.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kerr/error.hpp"
#include "kerr/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kConfigFailure = 2;
constexpr int kNumericalFailure = 3;

kerr::Scenario resolve(const std::string& what)
{
    if (fs::exists(what)) return kerr::load_scenario(what);
    if (auto b = kerr::find_builtin(what)) return *b;
    throw kerr::ConfigError("'" + what + "' is neither a config file nor a builtin scenario");
}

std::string amplitude(kerr::complex c)
{
    char buf[64];
    if (c.imag() == 0.0) std::snprintf(buf, sizeof buf, "%g", c.real());
    else std::snprintf(buf, sizeof buf, "%g%+gi", c.real(), c.imag());
    return buf;
}

void print_series(const kerr::SeriesResult& r)
{
    const auto& s = r.summary;
    std::printf("  %-15s", std::string(kerr::to_string(r.solver)).c_str());
    if (r.sweep_value) std::printf(" @ %-6g", *r.sweep_value);
    std::printf(" max<n> %.4f  maxP1 %.4f  maxP2 %.4f", s.max_n, s.max_p1, s.max_p2);
    if (s.g2_at_max_n) std::printf("  g2@peak %.4f", *s.g2_at_max_n);
    if (s.baseline_g2) std::printf("  g2 baseline %.4f", *s.baseline_g2);
    std::printf("  (%.1f s)\n", r.wall_clock);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Driven dissipative Kerr resonator under a Gaussian pulse train"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a scenario file or builtin name");
    std::string target;
    std::string solver;
    std::uint64_t seed = 0;
    std::size_t n_traj = 0, dim = 0;
    unsigned workers = 0;
    std::string out_dir;
    bool timing = false;
    run->add_option("config", target, "config file or builtin scenario name")->required();
    auto* solver_opt = run->add_option("-s,--solver", solver, "master-equation | trajectories | both")
                           ->check(CLI::IsMember({"master-equation", "me", "trajectories", "traj", "both"}));
    auto* seed_opt = run->add_option("--seed", seed, "root seed for the trajectory ensemble");
    auto* ntraj_opt = run->add_option("-n,--trajectories", n_traj, "trajectory count")->check(CLI::PositiveNumber);
    auto* dim_opt = run->add_option("-d,--dim", dim, "Fock truncation for both solvers")->check(CLI::PositiveNumber);
    auto* workers_opt = run->add_option("-j,--workers", workers, "trajectory worker threads (0: all cores)");
    auto* out_opt = run->add_option("-o,--out", out_dir, "output directory");
    run->add_flag("--timing", timing, "record wall-clock times in the summary");

    auto* list = app.add_subcommand("list", "list builtin scenarios");

    auto* gen = app.add_subcommand("generate-builtins", "write every builtin as a config file");
    std::string gen_dir;
    gen->add_option("dir", gen_dir, "target directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigFailure;
    }

    try {
        if (*list) {
            for (const auto& s : kerr::builtin_scenarios()) {
                std::printf("%-15s chi=%g gamma=%g delta=%g n_th=%g Omega=%s T=%g tau=%g",
                            s.name.c_str(), s.system.chi, s.system.gamma, s.system.delta,
                            s.system.n_th, amplitude(s.pulses.omega).c_str(), s.pulses.width_T,
                            s.pulses.period_tau);
                if (s.sweep) {
                    std::printf(" sweep %s {", s.sweep->parameter.c_str());
                    for (std::size_t i = 0; i < s.sweep->values.size(); ++i)
                        std::printf(i ? ", %g" : "%g", s.sweep->values[i]);
                    std::printf("}");
                }
                std::printf("  %s\n", s.description.c_str());
            }
            return 0;
        }
        if (*gen) {
            for (const auto& s : kerr::builtin_scenarios()) {
                const fs::path file = fs::path(gen_dir) / (s.name + ".json");
                kerr::write_atomically(file, kerr::to_config_text(s));
                std::printf("%s\n", file.string().c_str());
            }
            return 0;
        }

        kerr::RunOptions opt;
        if (*solver_opt) opt.solver = kerr::parse_solver(solver);
        if (*seed_opt) opt.seed = seed;
        if (*ntraj_opt) opt.n_traj = n_traj;
        if (*dim_opt) opt.dim = dim;
        if (*workers_opt) opt.workers = workers;
        if (*out_opt) opt.output_directory = out_dir;
        opt.record_timing = timing;

        const auto result = kerr::run_scenario(resolve(target), opt);
        std::printf("%s\n", result.scenario.c_str());
        for (const auto& r : result.series) print_series(r);
        std::printf("summary: %s\n", result.document.string().c_str());
        return 0;
    } catch (const kerr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigFailure;
    } catch (const kerr::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const kerr::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
