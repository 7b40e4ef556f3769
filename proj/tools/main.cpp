// main.cpp — nmphoton command line: scenario verbs, figure presets, sweeps

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nmphoton/presets.hpp"
#include "nmphoton/runner.hpp"
#include "nmphoton/scenario.hpp"

namespace {

using namespace nmphoton;

constexpr int kValidation = 2;
constexpr int kSolver = 3;
constexpr int kVerifyFailed = 1;

struct Options {
    std::string config;
    std::string out;
    std::optional<double> dt, t_max;
    bool verify{false};
    std::size_t workers{1};
    std::string figure;
    std::string axis;
    std::string values;
};

int report_checks(const RunReport& r, bool verify) {
    if (!verify) return 0;
    for (const auto& c : r.checks) std::cout << format_check(c) << '\n';
    std::cout << (r.passed() ? "verify: all checks passed" : "verify: some checks FAILED") << '\n';
    return r.passed() ? 0 : kVerifyFailed;
}

json load_for_verb(const Options& o, const std::string& verb) {
    if (o.config.empty()) throw ValidationError(verb + ": --config is required");
    json j = load_json_file(o.config);
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    if (j.contains("mode") && j["mode"] != verb)
        throw ValidationError("config mode '" + j["mode"].dump() + "' does not match verb '" + verb + "'");
    j["mode"] = verb;
    if (o.dt) j["grid"]["dt"] = *o.dt;
    if (o.t_max) j["grid"]["t_max"] = *o.t_max;
    return j;
}

fs::path out_dir(const Options& o, const ScenarioConfig* c, const std::string& fallback) {
    if (!o.out.empty()) return o.out;
    if (c && !c->output.empty()) return c->output;
    return fs::path("out") / fallback;
}

int run_verb(const Options& o, const std::string& verb) {
    const json j = load_for_verb(o, verb);
    const auto base = fs::path(o.config).parent_path();
    const auto cfg = parse_config(j, base);
    const auto out = out_dir(o, &cfg, verb);
    const auto rep = run_scenario(cfg, out);
    std::cout << verb << ": artifacts in " << out.string() << '\n';
    return report_checks(rep, o.verify);
}

int run_figure_verb(const Options& o) {
    if (!o.config.empty()) throw ValidationError("figure presets take no --config; only --dt and --t-max may change");
    const auto out = out_dir(o, nullptr, o.figure);
    const auto fr = run_figure(o.figure, o.dt, o.t_max, out, o.workers);
    std::cout << "figure " << o.figure << ": artifacts in " << out.string() << '\n';
    if (fr.status != 0) {
        for (const auto& p : fr.report.summary["points"])
            if (p["status"] != 0) std::cerr << "error: " << p["name"].get<std::string>() << ": " << p["error"].get<std::string>() << '\n';
        return fr.status;
    }
    return report_checks(fr.report, o.verify);
}

std::vector<json> parse_values(const std::string& s) {
    std::vector<json> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            v.push_back(json::parse(item));
        } catch (const json::exception&) {
            v.push_back(item);  // bare word: treat as string
        }
    }
    return v;
}

int run_sweep_verb(const Options& o) {
    if (o.config.empty()) throw ValidationError("sweep: --config is required");
    if (o.axis.empty()) throw ValidationError("sweep: --axis is required");
    json j = load_json_file(o.config);
    if (!j.is_object() || !j.contains("mode"))
        throw ValidationError("sweep: the config must name its scenario with a 'mode' key (e.g. \"mode\": \"design\")");
    if (o.dt) j["grid"]["dt"] = *o.dt;
    if (o.t_max) j["grid"]["t_max"] = *o.t_max;
    const auto values = parse_values(o.values);
    const auto out = out_dir(o, nullptr, "sweep");
    const auto res = sweep(j, fs::path(o.config).parent_path(), o.axis, values, o.workers, out);
    std::cout << "sweep: " << res.points.size() << " points in " << out.string() << '\n';
    for (const auto& p : res.points)
        if (p.status) std::cerr << "error: " << p.dir.filename().string() << ": " << p.error << '\n';
    if (res.status()) return res.status();
    if (!o.verify) return 0;
    int rc = 0;
    for (const auto& p : res.points) {
        std::cout << "[" << p.dir.filename().string() << "]\n";
        rc = std::max(rc, report_checks(p.report, true));
    }
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nmphoton: drive design and simulation for single-photon sources with memory baths"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sc, bool with_config) {
        if (with_config) sc->add_option("--config", o.config, "scenario config (JSON)");
        sc->add_option("--out", o.out, "output directory");
        sc->add_option("--dt", o.dt, "time step (us)");
        sc->add_option("--t-max", o.t_max, "horizon (us)");
        sc->add_flag("--verify", o.verify, "print module checks; exit 1 if any fails");
        sc->add_option("--workers", o.workers, "worker threads for multi-point runs")->check(CLI::PositiveNumber);
    };
    std::vector<std::pair<std::string, CLI::App*>> verbs;
    for (const char* v : {"design", "simulate", "multi-env", "solve-widths", "network", "oracle-check"}) {
        auto* sc = app.add_subcommand(v, std::string("run a '") + v + "' scenario");
        common(sc, true);
        verbs.emplace_back(v, sc);
    }
    auto* fig = app.add_subcommand("figure", "run a figure preset (fig2..fig13)");
    fig->add_option("id", o.figure, "preset id")->required();
    fig->add_option("--config", o.config, "rejected: presets are fixed");
    common(fig, false);
    auto* sw = app.add_subcommand("sweep", "sweep one config value over a list");
    common(sw, true);
    sw->add_option("--axis", o.axis, "dotted path into the config, e.g. environments.0.lambda");
    sw->add_option("--values", o.values, "comma-separated values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kValidation;
    }

    try {
        if (fig->parsed()) return run_figure_verb(o);
        if (sw->parsed()) return run_sweep_verb(o);
        for (const auto& [name, sc] : verbs)
            if (sc->parsed()) return run_verb(o, name);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSolver;
    }
    return kValidation;
}
