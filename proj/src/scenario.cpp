#include "kerr/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "kerr/error.hpp"

namespace kerr {

using nlohmann::json;

std::string_view to_string(SolverSelect s)
{
    switch (s) {
    case SolverSelect::master_equation: return "master-equation";
    case SolverSelect::trajectories: return "trajectories";
    case SolverSelect::both: return "both";
    }
    return "?";
}

SolverSelect parse_solver(std::string_view s)
{
    if (s == "master-equation" || s == "me") return SolverSelect::master_equation;
    if (s == "trajectories" || s == "traj") return SolverSelect::trajectories;
    if (s == "both") return SolverSelect::both;
    throw ConfigError("unknown solver '" + std::string(s) + "'");
}

const std::vector<std::string>& sweepable_parameters()
{
    static const std::vector<std::string> paths{
        "system.chi",   "system.gamma", "system.delta", "system.n_th", "system.dim",
        "pulses.omega", "pulses.T",     "pulses.tau",   "pulses.t0",   "evolution.t_end",
    };
    return paths;
}

void Scenario::validate() const
{
    auto fail = [&](const std::string& msg) { throw ConfigError(name + ": " + msg); };
    if (name.empty()) throw ConfigError("scenario needs a name");
    if (name.find_first_of("/\\ ") != std::string::npos) fail("name must not contain spaces or slashes");
    if (resonance_order && *resonance_order < 1) fail("resonance_order must be >= 1");
    if (!(t_end > 0.0)) fail("t_end must be positive");
    if (!(dt_max > 0.0)) fail("dt_max must be positive");
    if (!(sample_dt > 0.0) || sample_dt > t_end) fail("sample_dt must lie in (0, t_end]");
    if (report_levels < 2) fail("report_levels must be at least 2");
    if (solver != SolverSelect::master_equation) {
        if (trajectories.count == 0) fail("trajectory count must be positive");
        if (trajectories.dim <= report_levels) fail("trajectory dim must exceed report_levels");
        if (!(trajectories.sample_dt > 0.0) || !(trajectories.dt_max > 0.0))
            fail("trajectory sample_dt and dt_max must be positive");
    }
    if (sweep) {
        const auto& known = sweepable_parameters();
        if (std::find(known.begin(), known.end(), sweep->parameter) == known.end())
            fail("unknown sweep parameter '" + sweep->parameter + "'");
        if (sweep->values.empty()) fail("sweep value list is empty");
        if (sweep->parameter == "system.delta" && resonance_order)
            fail("cannot sweep delta while resonance_order fixes it");
    }
    try {
        for (const auto& op : operating_points(*this)) {
            op.system.validate();
            op.pulses.validate();
            if (op.system.dim <= report_levels) fail("dim must exceed report_levels");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        fail(e.what());
    }
}

namespace {

void apply(OperatingPoint& op, const std::string& path, double v)
{
    if (path == "system.chi") op.system.chi = v;
    else if (path == "system.gamma") op.system.gamma = v;
    else if (path == "system.delta") op.system.delta = v;
    else if (path == "system.n_th") op.system.n_th = v;
    else if (path == "system.dim") {
        if (v < 1.0 || v != std::floor(v)) throw ConfigError("system.dim sweep values must be positive integers");
        op.system.dim = static_cast<std::size_t>(v);
    } else if (path == "pulses.omega") op.pulses.omega = v;
    else if (path == "pulses.T") op.pulses.width_T = v;
    else if (path == "pulses.tau") op.pulses.period_tau = v;
    else if (path == "pulses.t0") op.pulses.t0 = v;
    else if (path == "evolution.t_end") op.t_end = v;
    else throw ConfigError("unknown sweep parameter '" + path + "'");
}

OperatingPoint resolve(const Scenario& s, std::optional<double> value)
{
    OperatingPoint op{s.system, s.pulses, s.t_end, value};
    if (value) apply(op, s.sweep->parameter, *value);
    if (s.resonance_order) op.system.delta = resonance_detuning(*s.resonance_order, op.system.chi);
    if (!op.pulses.count && op.pulses.period_tau > 0.0)
        op.pulses.count = window_spanning_count(op.t_end, op.pulses.period_tau);
    return op;
}

} // namespace

std::vector<OperatingPoint> operating_points(const Scenario& s)
{
    std::vector<OperatingPoint> out;
    if (!s.sweep) {
        out.push_back(resolve(s, std::nullopt));
        return out;
    }
    for (double v : s.sweep->values) out.push_back(resolve(s, v));
    return out;
}

// ---- config text -------------------------------------------------------

namespace {

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys)
{
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& item : obj.items()) {
        const bool known = std::any_of(keys.begin(), keys.end(),
                                       [&](const char* k) { return item.key() == k; });
        if (!known) throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback)
{
    if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
    return obj.at(key).get<T>();
}

complex read_amplitude(const json& v)
{
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError("pulses.omega must be a number or a [re, im] pair");
}

json write_amplitude(complex c)
{
    if (c.imag() == 0.0) return c.real();
    return json::array({c.real(), c.imag()});
}

} // namespace

Scenario parse_scenario(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config does not parse: ") + e.what());
    }

    Scenario s;
    try {
        only_keys(doc, "scenario",
                  {"name", "description", "units", "system", "pulses", "evolution", "solver",
                   "trajectories", "sweep", "output"});
        if (doc.contains("units") && doc.at("units") != "gamma")
            throw ConfigError("only 'gamma' units are supported (hbar = gamma = 1)");
        s.name = doc.at("name").get<std::string>();
        s.description = get_or<std::string>(doc, "description", "");

        const json& sys = doc.at("system");
        only_keys(sys, "system", {"chi", "gamma", "delta", "resonance_order", "n_th", "dim"});
        s.system.chi = sys.at("chi").get<double>();
        s.system.gamma = get_or(sys, "gamma", 1.0);
        s.system.n_th = get_or(sys, "n_th", 0.0);
        s.system.dim = get_or<std::size_t>(sys, "dim", 50);
        if (sys.contains("resonance_order") && !sys.at("resonance_order").is_null()) {
            s.resonance_order = sys.at("resonance_order").get<int>();
            if (sys.contains("delta") && s.resonance_order >= 1 &&
                sys.at("delta").get<double>() != resonance_detuning(*s.resonance_order, s.system.chi))
                throw ConfigError("delta disagrees with resonance_order");
            if (*s.resonance_order >= 1)
                s.system.delta = resonance_detuning(*s.resonance_order, s.system.chi);
        } else {
            s.system.delta = get_or(sys, "delta", 0.0);
        }

        const json& pul = doc.at("pulses");
        only_keys(pul, "pulses", {"omega", "T", "tau", "t0", "count"});
        s.pulses.omega = read_amplitude(pul.at("omega"));
        s.pulses.width_T = pul.at("T").get<double>();
        s.pulses.period_tau = pul.at("tau").get<double>();
        s.pulses.t0 = get_or(pul, "t0", 2.0);
        if (pul.contains("count") && !pul.at("count").is_null())
            s.pulses.count = pul.at("count").get<std::size_t>();

        if (doc.contains("evolution")) {
            const json& ev = doc.at("evolution");
            only_keys(ev, "evolution", {"t_end", "dt_max", "sample_dt", "initial_state", "report_levels"});
            s.t_end = get_or(ev, "t_end", 4.0 * s.pulses.period_tau);
            s.dt_max = get_or(ev, "dt_max", s.dt_max);
            s.sample_dt = get_or(ev, "sample_dt", s.sample_dt);
            s.report_levels = get_or(ev, "report_levels", s.report_levels);
            const auto init = get_or<std::string>(ev, "initial_state", "thermal");
            if (init == "thermal") s.initial = InitialKind::thermal;
            else if (init == "vacuum") s.initial = InitialKind::vacuum;
            else throw ConfigError("initial_state must be 'thermal' or 'vacuum'");
        } else {
            s.t_end = 4.0 * s.pulses.period_tau;
        }

        if (doc.contains("solver")) s.solver = parse_solver(doc.at("solver").get<std::string>());

        if (doc.contains("trajectories")) {
            const json& tr = doc.at("trajectories");
            only_keys(tr, "trajectories", {"count", "seed", "dim", "sample_dt", "dt_max", "workers"});
            auto& t = s.trajectories;
            t.count = get_or(tr, "count", t.count);
            t.seed = get_or(tr, "seed", t.seed);
            t.dim = get_or(tr, "dim", t.dim);
            t.sample_dt = get_or(tr, "sample_dt", t.sample_dt);
            t.dt_max = get_or(tr, "dt_max", t.dt_max);
            t.workers = get_or(tr, "workers", t.workers);
        }

        if (doc.contains("sweep") && !doc.at("sweep").is_null()) {
            const json& sw = doc.at("sweep");
            only_keys(sw, "sweep", {"parameter", "values"});
            s.sweep = SweepSpec{sw.at("parameter").get<std::string>(),
                                sw.at("values").get<std::vector<double>>()};
        }

        if (doc.contains("output")) {
            only_keys(doc.at("output"), "output", {"directory"});
            s.output_directory = get_or<std::string>(doc.at("output"), "directory", s.output_directory);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot open config " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string to_config_text(const Scenario& s)
{
    json sys = {{"chi", s.system.chi}, {"gamma", s.system.gamma}, {"n_th", s.system.n_th},
                {"dim", s.system.dim}};
    if (s.resonance_order) sys["resonance_order"] = *s.resonance_order;
    else sys["delta"] = s.system.delta;

    json pul = {{"omega", write_amplitude(s.pulses.omega)}, {"T", s.pulses.width_T},
                {"tau", s.pulses.period_tau}, {"t0", s.pulses.t0}, {"count", nullptr}};
    if (s.pulses.count) pul["count"] = *s.pulses.count;

    const auto& t = s.trajectories;
    json doc = {
        {"name", s.name},
        {"description", s.description},
        {"units", "gamma"},
        {"system", sys},
        {"pulses", pul},
        {"evolution",
         {{"t_end", s.t_end}, {"dt_max", s.dt_max}, {"sample_dt", s.sample_dt},
          {"initial_state", s.initial == InitialKind::thermal ? "thermal" : "vacuum"},
          {"report_levels", s.report_levels}}},
        {"solver", std::string(to_string(s.solver))},
        {"trajectories",
         {{"count", t.count}, {"seed", t.seed}, {"dim", t.dim}, {"sample_dt", t.sample_dt},
          {"dt_max", t.dt_max}, {"workers", t.workers}}},
        {"output", {{"directory", s.output_directory}}},
    };
    if (s.sweep) doc["sweep"] = {{"parameter", s.sweep->parameter}, {"values", s.sweep->values}};
    return doc.dump(2) + "\n";
}

// ---- builtins ----------------------------------------------------------

namespace {

Scenario make(std::string name, std::string description, double chi, double omega, int order,
              double n_th, double T = 0.4, double tau = 5.5)
{
    Scenario s;
    s.name = std::move(name);
    s.description = std::move(description);
    s.system.chi = chi;
    s.system.n_th = n_th;
    s.system.dim = 50;
    s.resonance_order = order;
    s.system.delta = resonance_detuning(order, chi);
    s.pulses.omega = omega;
    s.pulses.width_T = T;
    s.pulses.period_tau = tau;
    s.pulses.t0 = 2.0;
    s.t_end = 4.0 * tau;
    return s;
}

std::vector<Scenario> make_builtins()
{
    std::vector<Scenario> b;
    b.push_back(make("fig1-onephoton", "one-photon resonance, vacuum bath", 15, 6, 1, 0.0));
    b.push_back(make("fig1-twophoton", "two-photon resonance, vacuum bath", 30, 12, 2, 0.0));
    b.push_back(make("fig2-onephoton", "one-photon resonance, weak thermal bath", 15, 6, 1, 0.1));
    b.push_back(make("fig2-twophoton", "two-photon resonance, weak thermal bath", 30, 12, 2, 0.1));
    auto sweep = make("fig3-sweep", "one-photon resonance, bath occupation sweep", 15, 6, 1, 0.0);
    sweep.sweep = SweepSpec{"system.n_th", {0.0, 0.1, 0.25, 0.5, 1.0, 1.9}};
    b.push_back(sweep);
    b.push_back(make("fig4a", "one-photon resonance, n_th = 0.58", 15, 6, 1, 0.58));
    b.push_back(make("fig4b", "two-photon resonance, n_th = 0.58", 30, 12, 2, 0.58));
    b.push_back(make("fig4c", "one-photon resonance, n_th = 1.9", 15, 6, 1, 1.9));
    b.push_back(make("fig4d", "two-photon resonance, n_th = 1.9", 30, 12, 2, 1.9));
    b.push_back(make("fig5a", "one-photon resonance, long pulses", 15, 8, 1, 0.0, 0.8, 4.0));
    b.push_back(make("fig5b", "two-photon resonance, long pulses", 30, 12, 2, 0.0, 0.8, 4.0));
    b.push_back(make("fig6a", "one-photon resonance, strong pump", 15, 14, 1, 0.0));
    b.push_back(make("fig6b", "two-photon resonance, strong pump", 30, 25, 2, 0.0));
    for (auto& s : b) s.validate();
    return b;
}

} // namespace

const std::vector<Scenario>& builtin_scenarios()
{
    static const std::vector<Scenario> all = make_builtins();
    return all;
}

std::optional<Scenario> find_builtin(std::string_view name)
{
    for (const auto& s : builtin_scenarios())
        if (s.name == name) return s;
    return std::nullopt;
}

} // namespace kerr
