// acceptance.cpp — end-to-end acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "nmphoton/designer.hpp"
#include "nmphoton/multi_env.hpp"
#include "nmphoton/network.hpp"
#include "nmphoton/presets.hpp"
#include "nmphoton/runner.hpp"

using namespace nmphoton;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const fs::path& scratch() {
    static const fs::path d = [] {
        auto p = fs::temp_directory_path() / "nmphoton_acceptance";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return d;
}

int n_failed = 0;

void verdict(int id, bool ok, const std::string& what) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok) ++n_failed;
}

void detail(const std::string& s) { std::printf("    %s\n", s.c_str()); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

struct PresetOutcome {
    RunReport report;
    double seconds{0.0};
    int status{0};
};

PresetOutcome run_preset(const std::string& id) {
    const auto t0 = Clock::now();
    auto fr = run_figure(id, std::nullopt, std::nullopt, scratch() / id);
    return {fr.report, seconds_since(t0), fr.status};
}

bool name_has(const Check& c, const char* s) { return c.name.find(s) != std::string::npos; }

// ── criterion 1 ────────────────────────────────────────────────────────────────────────────────────

struct WidthCase {
    const char* fig;
    std::vector<double> nu, mu, reference;
};

void criterion_widths() {
    const std::vector<WidthCase> cases{
        {"fig9", {0.25, 0.2, 0.5, 0.05}, {0.25, 0.25, 0.25, 0.25}, {1.52, 24.87, 0.439}},
        {"fig10", {0.25, 0.2, 0.5, 0.05}, {0.25, 0.1, 13.0 / 40, 13.0 / 40}, {24.87, 4.3, 0.36}},
        {"fig11", {0.25, 0.25, 0.25, 0.25}, {0.25, 1.0 / 6, 0.125, 11.0 / 24}, {4.047, 24.87, 1.028}},
        {"fig12", {0.25, 1.0 / 3, 1.0 / 3, 1.0 / 12}, {0.25, 0.25, 0.25, 0.25}, {3.149, 3.149, 0.667}},
        {"fig13", {0.25, 1.0 / 3, 0.25, 1.0 / 6}, {0.25, 1.0 / 6, 0.125, 11.0 / 24}, {24.87, 24.87, 0.717}},
    };
    bool ok = true;
    double worst = 0.0, slowest = 0.0;
    for (const auto& c : cases) {
        const auto t0 = Clock::now();
        const auto rep = solve_widths(2.0, c.nu, c.mu, 1.5, 0.5);
        const double secs = seconds_since(t0);
        slowest = std::max(slowest, secs);
        std::string line = std::string(c.fig) + ":";
        for (std::size_t j = 0; j < c.reference.size(); ++j) {
            double best = INFINITY, dev = INFINITY;
            for (double r : rep.channels[j].roots) {
                const double d = std::abs(r - c.reference[j]) / c.reference[j];
                if (d < dev) dev = d, best = r;
            }
            worst = std::max(worst, dev);
            const bool hit = dev <= 5e-3;
            ok = ok && hit;
            line += fmt(" lambda_%g=%.6g", double(j + 2), best) + fmt(" (ref %g, dev %.3g%%)", c.reference[j], 100 * dev) +
                    (hit ? "" : " MISS");
        }
        line += fmt(" [%.3f s]", secs);
        ok = ok && secs < 1.0;
        detail(line);
    }
    verdict(1, ok, fmt("width roots within 0.5%%: worst deviation %.3g%%, slowest solve %.3f s (< 1 s)", 100 * worst, slowest));
}

// ── criterion 2 ────────────────────────────────────────────────────────────────────────────────────

void criterion_roundtrip() {
    bool ok = true;
    double worst = 0.0, slowest = 0.0;
    for (const char* id : {"fig2", "fig5", "fig6", "fig7", "fig9", "fig10", "fig11", "fig12", "fig13"}) {
        const auto r = run_preset(id);
        slowest = std::max(slowest, r.seconds);
        bool pre_ok = r.status == 0 && r.seconds < 10.0;
        double pre_worst = 0.0;
        std::string bad;
        for (const auto& c : r.report.checks) {
            if (name_has(c, "roundtrip_rel_l2")) {
                pre_worst = std::max(pre_worst, c.value);
                if (!c.pass) pre_ok = false, bad += " " + c.name;
            }
            // a truncated design does not reproduce the target over the full horizon
            if (name_has(c, "target_feasible_within_horizon") && !c.pass) pre_ok = false, bad += " " + c.name;
        }
        worst = std::max(worst, pre_worst);
        ok = ok && pre_ok;
        detail(std::string(id) + fmt(": worst rel L2 %.3g, %.2f s", pre_worst, r.seconds) + (pre_ok ? "" : " FAILED:" + bad));
    }
    verdict(2, ok, fmt("round trips < 1e-3 over the full horizon: worst over feasible designs %.3g, slowest preset %.2f s (< 10 s)",
                       worst, slowest));
}

// ── criterion 3 ────────────────────────────────────────────────────────────────────────────────────

void criterion_oracle() {
    json j = make_preset("fig2").points.at(0).config;
    j["mode"] = "oracle-check";
    j["oracle"] = {{"n_modes", 4001}, {"window_factor", 40.0}};
    const auto cfg = parse_config(j);
    const auto t0 = Clock::now();
    const auto rep = run_scenario(cfg, scratch() / "oracle_fig2");
    const double secs = seconds_since(t0);
    bool ok = secs < 120.0;
    std::string line;
    for (const auto& c : rep.checks) {
        if (c.name == "oracle_norm_drift") {
            detail(fmt("oracle norm drift %.3g (informational)", c.value));
            continue;
        }
        ok = ok && c.pass;
        line += " " + c.name + fmt("=%.3g", c.value);
    }
    verdict(3, ok, "discretized bath (4001 modes, W=40 lambda) vs kernel solver, limit 1e-3:" + line + fmt(", %.1f s (< 120 s)", secs));
}

// ── criterion 4 ────────────────────────────────────────────────────────────────────────────────────

void criterion_markovian_transition() {
    const auto f3 = run_preset("fig3");
    const auto f4 = run_preset("fig4");
    bool ok = true;
    std::string line;
    for (const auto& c : f3.report.checks) {
        if (name_has(c, "rho_gap") || name_has(c, "omega_gap") || name_has(c, "backflow")) {
            ok = ok && c.pass;
            line += " " + c.name + fmt("=%.4g", c.value) + (c.pass ? "" : "(FAIL)");
        }
    }
    // monotone gap across the four λ values
    std::vector<double> gaps;
    const auto& pts = f4.report.summary["points"];
    for (double l : {2.31, 5.0, 10.0, 30.0}) {
        char name[32];
        std::snprintf(name, sizeof name, "lambda_%g", l);
        for (const auto& p : pts)
            if (p["name"] == name && p.contains("rho_gap")) gaps.push_back(p["rho_gap"].get<double>());
    }
    bool mono = gaps.size() == 4;
    for (std::size_t i = 1; mono && i < gaps.size(); ++i) mono = gaps[i] < gaps[i - 1];
    if (gaps.size() == 4) detail(fmt("rho gaps at lambda 2.31, 5, 10: %.4g, %.4g, %.4g", gaps[0], gaps[1], gaps[2]) + fmt(", 30: %.4g", gaps[3]));
    ok = ok && mono;
    verdict(4, ok, "memory to memoryless transition:" + line + (mono ? ", gap monotone in lambda" : ", gap NOT monotone"));
}

// ── criterion 5 ────────────────────────────────────────────────────────────────────────────────────

void criterion_normalization() {
    double worst_shape = 0.0;
    for (auto kind : {ShapeKind::Sin3, ShapeKind::T3Sin3, ShapeKind::Sin4})
        for (double B : {0.5, 1.5, 2.0, 5.0})
            for (double G : {0.5, 1.0, 2.0})
                for (double w : {1.0, 0.25}) {
                    WavepacketSpec s;
                    s.kind = kind;
                    s.B = B;
                    s.Gamma = G;
                    s.weight = w;
                    const auto g = extend_for_tail(s, TimeGrid::covering(6.0, 1e-3));
                    const double got = cumulative_integral4(abs2(evaluate(s, 0, g))).samples.back();
                    worst_shape = std::max(worst_shape, std::abs(got - w));
                }
    double worst_closure = 0.0;
    for (const char* id : {"fig9", "fig10", "fig11", "fig12", "fig13"}) {
        const auto r = run_preset(id);
        for (const auto& c : r.report.checks)
            if (c.name == "normalization_closure") worst_closure = std::max(worst_closure, c.value);
    }
    // memoryless sibling amplitudes are exactly √(μ_j/μ₁) times channel 1
    const auto grid = TimeGrid::covering(6.0, 1e-3);
    const std::vector<double> mu{0.25, 1.0 / 6, 0.125, 11.0 / 24};
    const auto sib = markovian_siblings(normalization_constants(1.5, 0.5, 0.25).E1, 1.5, 0.5, mu, grid);
    double worst_ratio = 0.0;
    for (std::size_t j = 1; j < mu.size(); ++j) {
        const double w1 = cumulative_integral4(abs2(sib[0])).samples.back();
        const double wj = cumulative_integral4(abs2(sib[j])).samples.back();
        worst_ratio = std::max(worst_ratio, std::abs(wj / w1 - mu[j] / mu[0]) / (mu[j] / mu[0]));
    }
    detail(fmt("shape normalization worst %.3g (<= 1e-5); sibling closure worst %.3g (<= 1e-3); weight ratio worst %.3g", worst_shape,
               worst_closure, worst_ratio));
    verdict(5, worst_shape <= 1e-5 && worst_closure <= 1e-3 && worst_ratio <= 1e-12, "normalization suite");
}

// ── criterion 6 ────────────────────────────────────────────────────────────────────────────────────

void criterion_budget() {
    const double pi = std::numbers::pi;
    const SystemParams p{30 * pi, 40, 6 * pi, 0.0, 0.0};
    // long enough that the memory auxiliaries have drained; no in-flight correction is applied
    const auto g = TimeGrid::covering(12.0, 1e-3);
    double worst = 0.0;
    std::string line;
    {
        const auto d = ComplexSignal::from_function(g, [](double) { return cplx(150.0); });
        const double nm = std::abs(norm_audit(simulate_nonmarkovian(p, {{10.0, 2.31}}, d, {}, g), p.gamma_prime).residual);
        const double mk = std::abs(norm_audit(simulate_markovian(p, {10.0}, d, {}, g), p.gamma_prime).residual);
        WavepacketSpec s;
        const auto des = design_drive_resonant({make_waveform(s)}, {{10.0, 2.31}}, p, g);
        const double dz = std::abs(norm_audit(simulate_nonmarkovian(p, {{10.0, 2.31}}, des.drive, {}, g), p.gamma_prime).residual);
        line += fmt("single cavity: constant drive %.3g (memory) %.3g (memoryless), designed drive %.3g;", nm, mk, dz);
        worst = std::max({worst, nm, mk, dz});
    }
    for (auto kind : {BathKind::NonMarkovian, BathKind::Markovian})
        for (std::size_t P : {1u, 2u, 3u})
            for (double tau : {0.0, 0.25}) {
                NetworkSpec n;
                n.delay_tau = tau;
                n.kind = kind;
                for (std::size_t q = 0; q < P; ++q) {
                    NodeSpec s;
                    s.channels = q == 0 ? std::vector<EnvironmentSpec>{{10.0, 2.31}}
                                        : std::vector<EnvironmentSpec>{{10.0, 2.31}, {2.0, 5.0}};
                    s.initial_state = q == 0 ? NodeInit::C : NodeInit::B;
                    n.nodes.push_back(s);
                    n.drives.push_back(ComplexSignal::from_function(g, [&](double) { return cplx(q == 0 ? 60.0 : 40.0); }));
                }
                const auto r = simulate_cascade(n, g);
                worst = std::max(worst, std::abs(r.audit.residual));
            }
    detail(line + fmt(" cascades P<=3 worst %.3g", worst));
    verdict(6, worst <= 1e-3, fmt("zero-input probability budget: worst |residual| %.3g (<= 1e-3)", worst));
}

// ── criterion 7 ────────────────────────────────────────────────────────────────────────────────────

std::vector<std::string> csv_columns(const fs::path& p, const std::string& suffix) {
    std::ifstream f(p);
    std::string header;
    std::getline(f, header);
    std::vector<std::string> names;
    std::stringstream hs(header);
    for (std::string c; std::getline(hs, c, ',');) names.push_back(c);
    std::vector<std::string> out;
    for (std::string row; std::getline(f, row);) {
        std::stringstream rs(row);
        std::size_t k = 0;
        for (std::string v; std::getline(rs, v, ','); ++k)
            if (k < names.size() && names[k].size() >= suffix.size() &&
                names[k].compare(names[k].size() - suffix.size(), suffix.size(), suffix) == 0)
                out.push_back(v);
    }
    return out;
}

void criterion_identities() {
    const double pi = std::numbers::pi;
    const auto grid = TimeGrid::covering(6.0, 1e-3);
    const std::vector<EnvironmentSpec> envs{{10.0, 2.31}};
    const WavepacketSpec s;
    const auto tgt = make_waveform(s);

    const auto gen = design_drive_general({tgt}, envs, {30 * pi, 40, 6 * pi, 0.0, 0.0}, grid);
    const double chi = chi_modulus_defect(gen);
    const auto res = design_drive_resonant({tgt}, envs, {30 * pi, 40, 6 * pi, 0.0, 0.0}, grid);
    double red = 0.0;
    for (std::size_t i = 0; i < grid.n_samples; ++i)
        red = std::max(red, std::abs(gen.drive[i] - res.drive[i]) / std::max(1.0, std::abs(res.drive[i])));
    const auto a = design_drive_real_target({tgt}, envs, {30 * pi, 40, 6 * pi, 0.0, 2.0}, grid);
    const auto b = design_drive_real_target({tgt}, envs, {30 * pi, 40, 6 * pi, 1.3, 2.0}, grid);
    double d1 = 0.0;
    for (std::size_t i = 0; i < grid.n_samples; ++i) d1 = std::max(d1, std::abs(std::abs(a.drive[i]) - std::abs(b.drive[i])));

    // memoryless siblings and drive unchanged when every λ is perturbed
    json base = make_preset("fig9").points.at(0).config;
    json pert = base;
    pert["environments"][0]["lambda"] = pert["environments"][0]["lambda"].get<double>() * 1.03;
    pert["multi_env"]["lambdas"] = {1.52 * 1.03, 24.87 * 1.03, 0.439 * 1.03};
    base["multi_env"]["lambdas"] = {1.52, 24.87, 0.439};
    run_scenario(parse_config(base), scratch() / "invariance_base");
    run_scenario(parse_config(pert), scratch() / "invariance_perturbed");
    bool bits = true;
    for (const auto& [file, suffix] : std::vector<std::pair<std::string, std::string>>{{"channels.csv", "_f"}, {"design_markovian.csv", "omega"}}) {
        const auto x = csv_columns(scratch() / "invariance_base" / file, suffix);
        const auto y = csv_columns(scratch() / "invariance_perturbed" / file, suffix);
        bits = bits && !x.empty() && x == y;
    }

    const EnvironmentSpec e1{10.0, 2.0};
    WavepacketSpec s1;
    s1.B = 1.5;
    s1.Gamma = 0.5;
    s1.weight = 0.25;
    const auto a1 = make_waveform(s1);
    // Domain of the series check: t in [0, 5], the three fig9 widths (all <= 25).
    double series = 0.0;
    std::string per_lambda;
    const std::size_t n5 = TimeGrid::covering(5.0, grid.dt).n_samples;
    for (double lj : {1.5215307711546215, 24.870972538851994, 0.43943485894499607}) {
        const auto sr = series_expansion(a1, e1, 3.0, lj, 40, grid);
        const auto exact = sibling_wavepacket(a1.expsum(), e1, {3.0, lj}).sample(grid);
        double m = 0.0;
        for (std::size_t i = 0; i < n5; ++i) m = std::max(m, std::abs(sr.partial.back()[i] - exact[i]));
        per_lambda += fmt(" lambda_j=%.4g: %.3g;", lj, m);
        series = std::max(series, m);
    }
    detail("series n=40 sup gap on [0,5]:" + per_lambda);
    detail(fmt("chi defect %.3g (<= 1e-6); reduction at zero detuning %.3g (<= 1e-8); |Omega| delta1 spread %.3g (<= 1e-10)", chi, red, d1));
    detail(fmt("series n=40 worst %.3g (<= 1e-6); memoryless siblings bit-invariant: ", series) + (bits ? "yes" : "NO"));
    verdict(7, chi <= 1e-6 && red <= 1e-8 && d1 <= 1e-10 && bits && series <= 1e-6, "identity suite");
}

}  // namespace

int main() {
    const std::vector<std::pair<int, std::function<void()>>> criteria{
        {1, criterion_widths},         {2, criterion_roundtrip},      {3, criterion_oracle},
        {4, criterion_markovian_transition}, {5, criterion_normalization}, {6, criterion_budget},
        {7, criterion_identities},
    };
    for (const auto& [id, f] : criteria) {
        try {
            f();
        } catch (const std::exception& e) {
            verdict(id, false, std::string("threw: ") + e.what());
        }
    }
    std::printf("%d of %zu criteria failed\n", n_failed, criteria.size());
    return n_failed == 0 ? 0 : 1;
}
