// scenario.hpp — scenario configuration: strict JSON schema, parsed into library value types

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmphoton/designer.hpp"
#include "nmphoton/errors.hpp"
#include "nmphoton/forward.hpp"
#include "nmphoton/grid.hpp"
#include "nmphoton/kernels.hpp"
#include "nmphoton/multi_env.hpp"
#include "nmphoton/network.hpp"
#include "nmphoton/wavepackets.hpp"

namespace nmphoton {

using json = nlohmann::json;

enum class BathChoice { NonMarkovian, Markovian, Both };

// One output channel target: an analytic/tabulated shape, or the sibling of target 1 (α_j from α_1).
struct TargetConfig {
    bool sibling{false};
    WavepacketSpec spec{};
};

struct DesignSettings {
    std::string method{"auto"};  // auto, general, real, resonant
    DesignOptions options{};
};

struct MultiEnvSettings {
    bool present{false};
    double B{1.5}, Gamma{0.5};
    std::vector<double> nu, mu;
    std::vector<double> lambdas;   // λ_2..λ_M if fixed by the user
    std::vector<double> expected;  // reference roots λ_2..λ_M: pick the closest root, verify within 0.5%
    WidthSearch search{};
};

struct OracleSettings {
    std::size_t n_modes{4001};
    double window_factor{40.0};
};

struct DriveConfig {
    std::string kind{"zero"};  // zero, constant, design, file
    double value{0.0};
    std::string path;
    std::optional<WavepacketSpec> target;  // network sender design
};

struct SimulateSettings {
    DriveConfig drive{};
    std::string init{"c"};  // c, vacuum
    std::vector<std::optional<WavepacketSpec>> inputs;
};

struct NetworkNodeConfig {
    NodeSpec spec{};
    DriveConfig drive{};
};

struct NetworkSettings {
    double delay_tau{0.0};
    std::vector<NetworkNodeConfig> nodes;
};

struct ScenarioConfig {
    std::string mode;
    SystemParams params{};
    std::vector<EnvironmentSpec> envs;
    std::vector<TargetConfig> targets;
    TimeGrid grid{1e-3, 6001};
    BathChoice bath{BathChoice::NonMarkovian};
    DesignSettings design{};
    MultiEnvSettings multi{};
    OracleSettings oracle{};
    SimulateSettings simulate{};
    NetworkSettings network{};
    std::string output;
};

inline const std::vector<std::string>& scenario_modes() {
    static const std::vector<std::string> m{"design", "simulate", "multi-env", "solve-widths", "network",
                                            "oracle-check", "figure"};
    return m;
}

namespace detail {

inline void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ValidationError("config: " + where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; });
        if (!ok) throw ValidationError("config: unknown key '" + it.key() + "' in " + where);
    }
}

inline double num(const json& j, const char* key, double fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ValidationError("config: " + where + "." + key + " must be a number");
    return j[key].get<double>();
}

inline std::string str(const json& j, const char* key, const std::string& fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) throw ValidationError("config: " + where + "." + key + " must be a string");
    return j[key].get<std::string>();
}

inline std::vector<double> numbers(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) return {};
    const auto& a = j[key];
    if (!a.is_array()) throw ValidationError("config: " + where + "." + key + " must be an array");
    std::vector<double> v;
    for (const auto& x : a) {
        if (!x.is_number()) throw ValidationError("config: " + where + "." + key + " must hold numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

inline SystemParams parse_params(const json& j, SystemParams p, const std::string& where) {
    check_keys(j, {"g_c", "n_atoms", "gamma_prime", "delta1", "delta2"}, where);
    p.g_c = num(j, "g_c", p.g_c, where);
    if (j.contains("n_atoms")) {
        if (!j["n_atoms"].is_number_integer()) throw ValidationError("config: " + where + ".n_atoms must be an integer");
        p.n_atoms = j["n_atoms"].get<int>();
    }
    p.gamma_prime = num(j, "gamma_prime", p.gamma_prime, where);
    p.delta1 = num(j, "delta1", p.delta1, where);
    p.delta2 = num(j, "delta2", p.delta2, where);
    return p;
}

inline EnvironmentSpec parse_env(const json& j, const std::string& where) {
    check_keys(j, {"gamma", "lambda"}, where);
    EnvironmentSpec e;
    e.gamma = num(j, "gamma", e.gamma, where);
    e.lambda = num(j, "lambda", e.lambda, where);
    e.validate();
    return e;
}

inline std::vector<EnvironmentSpec> parse_envs(const json& j, const std::string& where) {
    if (!j.is_array()) throw ValidationError("config: " + where + " must be an array");
    std::vector<EnvironmentSpec> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(parse_env(j[i], where + "[" + std::to_string(i) + "]"));
    return v;
}

inline std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
    const std::filesystem::path q(p);
    return q.is_absolute() || base.empty() ? q : base / q;
}

inline ShapeKind shape_kind(const std::string& s, const std::string& where) {
    if (s == "sin3") return ShapeKind::Sin3;
    if (s == "t3sin3") return ShapeKind::T3Sin3;
    if (s == "sin4") return ShapeKind::Sin4;
    if (s == "tabulated") return ShapeKind::Tabulated;
    throw ValidationError("config: " + where + ".shape '" + s + "' unknown (sin3, t3sin3, sin4, tabulated, sibling)");
}

inline WavepacketSpec parse_shape(const json& j, const std::filesystem::path& base, const std::string& where) {
    check_keys(j, {"shape", "B", "Gamma", "weight", "phase_ce", "file"}, where);
    const auto kind = shape_kind(str(j, "shape", "sin3", where), where);
    WavepacketSpec s;
    if (kind == ShapeKind::Tabulated) {
        if (!j.contains("file")) throw ValidationError("config: " + where + " tabulated shape needs 'file'");
        s = load_tabulated_csv(resolve(j["file"].get<std::string>(), base).string());
        return s;
    }
    if (j.contains("file")) throw ValidationError("config: " + where + ".file only applies to tabulated shapes");
    s.kind = kind;
    s.B = num(j, "B", s.B, where);
    s.Gamma = num(j, "Gamma", s.Gamma, where);
    s.weight = num(j, "weight", s.weight, where);
    s.phase_ce = num(j, "phase_ce", s.phase_ce, where);
    s.validate();
    return s;
}

inline TargetConfig parse_target(const json& j, const std::filesystem::path& base, const std::string& where) {
    if (j.is_object() && j.contains("shape") && j["shape"] == "sibling") {
        check_keys(j, {"shape"}, where);
        return {true, {}};
    }
    return {false, parse_shape(j, base, where)};
}

inline TimeGrid parse_grid(const json& j, const std::string& where) {
    check_keys(j, {"dt", "t_max"}, where);
    const double dt = num(j, "dt", 1e-3, where);
    const double tm = num(j, "t_max", 6.0, where);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("config: grid.dt must be positive");
    if (!(tm >= dt) || !std::isfinite(tm)) throw ValidationError("config: grid.t_max must be >= dt");
    return TimeGrid::covering(tm, dt);
}

inline DriveConfig parse_drive(const json& j, const std::filesystem::path& base, const std::string& where) {
    check_keys(j, {"kind", "value", "file", "target"}, where);
    DriveConfig d;
    d.kind = str(j, "kind", "zero", where);
    if (d.kind != "zero" && d.kind != "constant" && d.kind != "design" && d.kind != "file")
        throw ValidationError("config: " + where + ".kind must be zero, constant, design or file");
    d.value = num(j, "value", 0.0, where);
    if (j.contains("file")) d.path = resolve(j["file"].get<std::string>(), base).string();
    if (d.kind == "file" && d.path.empty()) throw ValidationError("config: " + where + " file drive needs 'file'");
    if (j.contains("target")) d.target = parse_shape(j["target"], base, where + ".target");
    return d;
}

}  // namespace detail

inline ScenarioConfig parse_config(const json& j, const std::filesystem::path& base = {}) {
    using namespace detail;
    try {
        check_keys(j, {"mode", "params", "environments", "targets", "grid", "bath", "design", "multi_env", "oracle",
                       "simulate", "network", "output"},
                   "config");
        ScenarioConfig c;
        c.mode = str(j, "mode", "", "config");
        const auto& modes = scenario_modes();
        if (std::find(modes.begin(), modes.end(), c.mode) == modes.end() || c.mode == "figure")
            throw ValidationError("config: mode must be one of design, simulate, multi-env, solve-widths, network, "
                                  "oracle-check (figures are selected with the 'figure <id>' verb)");
        if (j.contains("params")) c.params = parse_params(j["params"], c.params, "params");
        if (j.contains("environments")) c.envs = parse_envs(j["environments"], "environments");
        if (j.contains("targets")) {
            if (!j["targets"].is_array()) throw ValidationError("config: targets must be an array");
            for (std::size_t i = 0; i < j["targets"].size(); ++i)
                c.targets.push_back(parse_target(j["targets"][i], base, "targets[" + std::to_string(i) + "]"));
        }
        if (j.contains("grid")) c.grid = parse_grid(j["grid"], "grid");
        const auto bath = str(j, "bath", "non-markovian", "config");
        if (bath == "non-markovian") c.bath = BathChoice::NonMarkovian;
        else if (bath == "markovian") c.bath = BathChoice::Markovian;
        else if (bath == "both") c.bath = BathChoice::Both;
        else throw ValidationError("config: bath must be non-markovian, markovian or both");
        if (j.contains("design")) {
            const auto& d = j["design"];
            check_keys(d, {"method", "rho_floor", "consistency_tol"}, "design");
            c.design.method = str(d, "method", "auto", "design");
            if (c.design.method != "auto" && c.design.method != "general" && c.design.method != "real" &&
                c.design.method != "resonant")
                throw ValidationError("config: design.method must be auto, general, real or resonant");
            c.design.options.rho_floor = num(d, "rho_floor", c.design.options.rho_floor, "design");
            c.design.options.consistency_tol = num(d, "consistency_tol", c.design.options.consistency_tol, "design");
        }
        if (j.contains("multi_env")) {
            const auto& m = j["multi_env"];
            check_keys(m, {"B", "Gamma", "nu", "mu", "lambdas", "expected", "search"}, "multi_env");
            c.multi.present = true;
            c.multi.B = num(m, "B", c.multi.B, "multi_env");
            c.multi.Gamma = num(m, "Gamma", c.multi.Gamma, "multi_env");
            c.multi.nu = numbers(m, "nu", "multi_env");
            c.multi.mu = numbers(m, "mu", "multi_env");
            c.multi.lambdas = numbers(m, "lambdas", "multi_env");
            c.multi.expected = numbers(m, "expected", "multi_env");
            if (m.contains("search")) {
                const auto& s = m["search"];
                check_keys(s, {"lambda_min", "lambda_max", "brackets", "rel_tol"}, "multi_env.search");
                c.multi.search.lambda_min = num(s, "lambda_min", c.multi.search.lambda_min, "multi_env.search");
                c.multi.search.lambda_max = num(s, "lambda_max", c.multi.search.lambda_max, "multi_env.search");
                c.multi.search.brackets = std::size_t(num(s, "brackets", double(c.multi.search.brackets), "multi_env.search"));
                c.multi.search.rel_tol = num(s, "rel_tol", c.multi.search.rel_tol, "multi_env.search");
            }
        }
        if (j.contains("oracle")) {
            const auto& o = j["oracle"];
            check_keys(o, {"n_modes", "window_factor"}, "oracle");
            const double nm = num(o, "n_modes", double(c.oracle.n_modes), "oracle");
            if (!(nm >= 3.0) || nm != std::floor(nm)) throw ValidationError("config: oracle.n_modes must be an integer >= 3");
            c.oracle.n_modes = std::size_t(nm);
            c.oracle.window_factor = num(o, "window_factor", c.oracle.window_factor, "oracle");
            if (!(c.oracle.window_factor > 0.0)) throw ValidationError("config: oracle.window_factor must be positive");
        }
        if (j.contains("simulate")) {
            const auto& s = j["simulate"];
            check_keys(s, {"drive", "init", "inputs"}, "simulate");
            if (s.contains("drive")) c.simulate.drive = parse_drive(s["drive"], base, "simulate.drive");
            c.simulate.init = str(s, "init", "c", "simulate");
            if (c.simulate.init != "c" && c.simulate.init != "vacuum")
                throw ValidationError("config: simulate.init must be c or vacuum");
            if (s.contains("inputs")) {
                if (!s["inputs"].is_array()) throw ValidationError("config: simulate.inputs must be an array");
                for (std::size_t i = 0; i < s["inputs"].size(); ++i) {
                    const auto& x = s["inputs"][i];
                    if (x.is_null()) c.simulate.inputs.emplace_back();
                    else c.simulate.inputs.emplace_back(parse_shape(x, base, "simulate.inputs[" + std::to_string(i) + "]"));
                }
            }
        }
        if (j.contains("network")) {
            const auto& n = j["network"];
            check_keys(n, {"delay_tau", "nodes"}, "network");
            c.network.delay_tau = num(n, "delay_tau", 0.0, "network");
            if (n.contains("nodes")) {
                if (!n["nodes"].is_array()) throw ValidationError("config: network.nodes must be an array");
                for (std::size_t q = 0; q < n["nodes"].size(); ++q) {
                    const auto& nj = n["nodes"][q];
                    const std::string w = "network.nodes[" + std::to_string(q) + "]";
                    check_keys(nj, {"params", "channels", "initial_state", "drive"}, w);
                    NetworkNodeConfig nc;
                    nc.spec.initial_state = q == 0 ? NodeInit::C : NodeInit::B;
                    if (nj.contains("params")) nc.spec.params = parse_params(nj["params"], nc.spec.params, w + ".params");
                    if (nj.contains("channels")) nc.spec.channels = parse_envs(nj["channels"], w + ".channels");
                    const auto init = str(nj, "initial_state", q == 0 ? "c" : "b", w);
                    if (init == "c") nc.spec.initial_state = NodeInit::C;
                    else if (init == "b") nc.spec.initial_state = NodeInit::B;
                    else throw ValidationError("config: " + w + ".initial_state must be c or b");
                    if (nj.contains("drive")) nc.drive = parse_drive(nj["drive"], base, w + ".drive");
                    c.network.nodes.push_back(std::move(nc));
                }
            }
        }
        c.output = str(j, "output", "", "config");
        c.grid.validate();
        return c;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
}

inline json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config " + path.string());
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::exception& e) {
        throw ValidationError("config " + path.string() + ": " + e.what());
    }
}

// Dotted path into a JSON document ("environments.0.lambda"); every segment must already exist.
inline json& at_path(json& j, const std::string& path) {
    json* cur = &j;
    std::size_t pos = 0;
    while (pos <= path.size()) {
        const auto dot = path.find('.', pos);
        const std::string seg = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (seg.empty()) throw ValidationError("sweep: malformed axis '" + path + "'");
        if (cur->is_array()) {
            std::size_t k = 0;
            try {
                std::size_t used = 0;
                k = std::stoul(seg, &used);
                if (used != seg.size()) throw std::invalid_argument(seg);
            } catch (const std::exception&) {
                throw ValidationError("sweep: axis '" + path + "': '" + seg + "' is not an index");
            }
            if (k >= cur->size()) throw ValidationError("sweep: axis '" + path + "' not found");
            cur = &(*cur)[k];
        } else if (cur->is_object() && cur->contains(seg)) {
            cur = &(*cur)[seg];
        } else {
            throw ValidationError("sweep: axis '" + path + "' not found");
        }
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    return *cur;
}

}  // namespace nmphoton
