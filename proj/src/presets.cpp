// presets.cpp — preset definitions and the multi-point figure runner

#include "nmphoton/presets.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <thread>

#include "nmphoton/errors.hpp"

namespace nmphoton {

namespace {

constexpr double pi = std::numbers::pi;

json params(double d1 = 0.0, double d2 = 0.0) {
    return {{"g_c", 30 * pi}, {"n_atoms", 40}, {"gamma_prime", 6 * pi}, {"delta1", d1}, {"delta2", d2}};
}

json sin3(double weight = 1.0, double ce = 0.0, double B = 2.0, double G = 0.5) {
    return {{"shape", "sin3"}, {"B", B}, {"Gamma", G}, {"weight", weight}, {"phase_ce", ce}};
}

json design(json targets, json envs, const std::string& bath) {
    return {{"mode", "design"},     {"params", params()}, {"environments", std::move(envs)},
            {"targets", std::move(targets)}, {"grid", {{"dt", 1e-3}, {"t_max", 6.0}}}, {"bath", bath}};
}

json env(double lambda, double gamma = 10.0) { return {{"gamma", gamma}, {"lambda", lambda}}; }

json single_sin3(double lambda, const std::string& bath) {
    return design(json::array({sin3()}), json::array({env(lambda)}), bath);
}

std::string tag(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

// Mechanisms: one channel; two identical channels (weights ½, γ₂=γ₁); two different channels
// (weights ⅓ and ⅔, γ₂=2γ₁, same λ, channel 2 the sibling of channel 1).
std::vector<PresetPoint> mechanisms(double lambda) {
    const std::string l = "_lambda_" + tag(lambda);
    return {{"mechanism_I" + l, single_sin3(lambda, "both")},
            {"mechanism_II" + l,
             design(json::array({sin3(0.5), sin3(0.5)}), json::array({env(lambda), env(lambda)}), "both")},
            {"mechanism_III" + l, design(json::array({sin3(1.0 / 3.0), {{"shape", "sibling"}}}),
                                         json::array({env(lambda), env(lambda, 20.0)}), "both")}};
}

std::vector<PresetPoint> shapes(double lambda) {
    const std::string l = "_lambda_" + tag(lambda);
    const json t3 = {{"shape", "t3sin3"}, {"B", 2.0}, {"Gamma", 0.5}, {"weight", 0.5}};
    const json s4 = {{"shape", "sin4"}, {"B", 2.0}, {"Gamma", 0.5}, {"weight", 1.0 / 3.0}};
    return {{"row_sin3" + l, single_sin3(lambda, "both")},
            {"row_t3sin3_pair" + l, design(json::array({t3, t3}), json::array({env(lambda), env(lambda)}), "both")},
            {"row_sin4_sibling" + l,
             design(json::array({s4, {{"shape", "sibling"}}}), json::array({env(lambda), env(lambda, 20.0)}), "both")}};
}

json widths(std::vector<double> nu, std::vector<double> mu, std::vector<double> expected) {
    return {{"mode", "multi-env"},
            {"params", params()},
            {"environments", json::array({env(2.0)})},
            {"grid", {{"dt", 1e-3}, {"t_max", 6.0}}},
            {"bath", "both"},
            {"multi_env", {{"B", 1.5}, {"Gamma", 0.5}, {"nu", nu}, {"mu", mu}, {"expected", expected}}}};
}

}  // namespace

const std::vector<std::string>& preset_ids() {
    static const std::vector<std::string> ids{"fig2", "fig3", "fig4",  "fig5",  "fig6",  "fig7",
                                              "fig8", "fig9", "fig10", "fig11", "fig12", "fig13"};
    return ids;
}

const std::vector<double>& fig4_lambdas() {
    static const std::vector<double> l{2.0, 2.31, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0, 15.0, 20.0, 30.0};
    return l;
}

Preset make_preset(const std::string& id) {
    Preset p;
    p.id = id;
    if (id == "fig2") {
        p.title = "sin3 target, lambda = 2.31 MHz: drive and emitted envelope";
        p.points = {{"", single_sin3(2.31, "non-markovian")}};
    } else if (id == "fig3") {
        p.title = "populations and drives with and without memory, lambda = 2.31 and 30 MHz";
        p.points = {{"lambda_2.31", single_sin3(2.31, "both")}, {"lambda_30", single_sin3(30.0, "both")}};
    } else if (id == "fig4") {
        p.title = "population of |c> over t and lambda_1";
        for (double l : fig4_lambdas()) p.points.push_back({"lambda_" + tag(l), single_sin3(l, "both")});
    } else if (id == "fig5") {
        p.title = "complex targets e^{-i c_e t}: modulus and argument of the drive, delta1 = 1, delta2 = 2";
        for (double ce : {0.0, 1.0, 2.0}) {
            json c = design(json::array({sin3(1.0, ce)}), json::array({env(2.31)}), "non-markovian");
            c["params"] = params(1.0, 2.0);
            c["design"] = {{"method", "general"}};
            p.points.push_back({"ce_" + tag(ce), c});
        }
    } else if (id == "fig6") {
        p.title = "one, two identical and two different output channels, lambda = 2.31 and 30 MHz";
        p.points = mechanisms(2.31);
        for (auto& q : mechanisms(30.0)) p.points.push_back(q);
    } else if (id == "fig7") {
        p.title = "sin3, t3 sin3 pair and sin4 with sibling, lambda = 2.31 MHz";
        p.points = shapes(2.31);
    } else if (id == "fig8") {
        p.title = "sin3, t3 sin3 pair and sin4 with sibling, lambda = 30 MHz";
        p.points = shapes(30.0);
    } else if (id == "fig9") {
        p.title = "four channels, mu all 1/4";
        p.points = {{"", widths({0.25, 0.2, 0.5, 0.05}, {0.25, 0.25, 0.25, 0.25}, {1.52, 24.87, 0.439})}};
    } else if (id == "fig10") {
        p.title = "four channels, mu = (1/4, 1/10, 13/40, 13/40)";
        p.points = {{"", widths({0.25, 0.2, 0.5, 0.05}, {0.25, 0.1, 13.0 / 40, 13.0 / 40}, {24.87, 4.3, 0.36})}};
    } else if (id == "fig11") {
        p.title = "four channels, mu = (1/4, 1/6, 1/8, 11/24), nu all 1/4";
        p.points = {{"", widths({0.25, 0.25, 0.25, 0.25}, {0.25, 1.0 / 6, 0.125, 11.0 / 24}, {4.047, 24.87, 1.028})}};
    } else if (id == "fig12") {
        p.title = "two equal channels: lambda2 = lambda3, mu2 = mu3, nu2 = nu3";
        p.points = {{"", widths({0.25, 1.0 / 3, 1.0 / 3, 1.0 / 12}, {0.25, 0.25, 0.25, 0.25}, {3.149, 3.149, 0.667})}};
    } else if (id == "fig13") {
        p.title = "equality broken: mu2 = 1/6, mu3 = 1/8, nu2 = 1/3, nu3 = 1/4";
        p.points = {{"", widths({0.25, 1.0 / 3, 0.25, 1.0 / 6}, {0.25, 1.0 / 6, 0.125, 11.0 / 24}, {24.87, 24.87, 0.717})}};
    } else {
        throw ValidationError("unknown figure '" + id + "' (fig2..fig13)");
    }
    return p;
}

FigureRun run_figure(const std::string& id, std::optional<double> dt, std::optional<double> t_max,
                            const fs::path& out, std::size_t workers) {
    const Preset p = make_preset(id);
    std::vector<json> cfgs;
    for (const auto& pt : p.points) {
        json c = pt.config;
        if (dt) c["grid"]["dt"] = *dt;
        if (t_max) c["grid"]["t_max"] = *t_max;
        cfgs.push_back(std::move(c));
    }
    // Points are independent; same worker scheme as sweep().
    std::vector<RunReport> reports(cfgs.size());
    std::vector<int> status(cfgs.size(), 0);
    std::vector<std::string> errors(cfgs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < cfgs.size(); k = next++) {
            const fs::path dir = p.points[k].name.empty() ? out : out / p.points[k].name;
            try {
                reports[k] = run_scenario(parse_config(cfgs[k]), dir);
            } catch (const ValidationError& e) {
                status[k] = 2;
                errors[k] = e.what();
            } catch (const std::exception& e) {
                status[k] = 3;
                errors[k] = e.what();
            }
        }
    };
    const std::size_t nw = std::max<std::size_t>(1, std::min(workers, cfgs.size()));
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < nw; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    FigureRun fr;
    io::json pts = io::json::array();
    for (std::size_t k = 0; k < cfgs.size(); ++k) {
        fr.status = std::max(fr.status, status[k]);
        const std::string prefix = p.points[k].name.empty() ? "" : p.points[k].name + ": ";
        fr.report.absorb(reports[k], prefix);
        io::json e = {{"name", p.points[k].name}, {"status", status[k]}};
        if (status[k]) e["error"] = errors[k];
        for (const char* bath : {"non_markovian", "markovian"})
            if (reports[k].summary.contains(bath) && reports[k].summary[bath].value("truncated", false))
                e[std::string(bath) + "_truncation_time"] = reports[k].summary[bath]["truncation_time"];
        for (const char* key : {"rho_gap", "omega_gap_relative", "peak_abs_omega", "norm_residual", "backflow_rise"})
            if (reports[k].summary.contains(key)) e[key] = reports[k].summary[key];
        pts.push_back(std::move(e));
    }

    // Figure-level properties spanning several points.
    auto gap = [&](std::size_t k, const char* key) {
        return reports[k].summary.contains(key) ? reports[k].summary[key].get<double>() : std::nan("");
    };
    if (fr.status == 0 && id == "fig3") {
        fr.report.checks.push_back(check_ge("lambda_2.31: rho_gap", gap(0, "rho_gap"), 0.05));
        fr.report.checks.push_back(check_ge("lambda_2.31: backflow_rise", gap(0, "backflow_rise"), 1e-3));
        fr.report.checks.push_back(check_le("lambda_30: rho_gap", gap(1, "rho_gap"), 0.02));
        fr.report.checks.push_back(check_le("lambda_30: omega_gap_relative", gap(1, "omega_gap_relative"), 0.05));
    }
    if (fr.status == 0 && id == "fig4") {
        bool mono = true;
        for (std::size_t k = 1; k < cfgs.size(); ++k) mono = mono && gap(k, "rho_gap") < gap(k - 1, "rho_gap");
        fr.report.checks.push_back(check_true("rho_gap_monotone_decreasing_in_lambda", mono));
    }
    io::json s = {{"figure", id}, {"title", p.title}, {"points", pts}, {"checks", checks_json(fr.report.checks)}};
    io::write_json(out / "figure.json", s);
    fr.report.summary = s;
    return fr;
}

}  // namespace nmphoton
