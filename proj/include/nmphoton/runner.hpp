// runner.hpp — executes scenario modes, writes artifacts, evaluates the module-level checks

#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "nmphoton/io.hpp"
#include "nmphoton/scenario.hpp"

namespace nmphoton {

namespace fs = std::filesystem;

struct Check {
    std::string name;
    double value{0.0};
    double limit{0.0};
    std::string relation;  // "<=", ">=", "=="
    bool pass{false};
};

inline Check check_le(std::string name, double v, double limit) { return {std::move(name), v, limit, "<=", v <= limit}; }
inline Check check_ge(std::string name, double v, double limit) { return {std::move(name), v, limit, ">=", v >= limit}; }
inline Check check_true(std::string name, bool ok) { return {std::move(name), ok ? 1.0 : 0.0, 1.0, "==", ok}; }

struct RunReport {
    io::json summary = io::json::object();
    std::vector<Check> checks;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    }
    void absorb(const RunReport& o, const std::string& prefix) {
        for (auto c : o.checks) {
            c.name = prefix + c.name;
            checks.push_back(std::move(c));
        }
    }
};

inline io::json checks_json(const std::vector<Check>& cs) {
    io::json a = io::json::array();
    for (const auto& c : cs)
        a.push_back({{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"limit", c.limit}, {"pass", c.pass}});
    return a;
}

inline std::string format_check(const Check& c) {
    char buf[96];
    std::snprintf(buf, sizeof buf, " = %.6g (%s %.6g)", c.value, c.relation.c_str(), c.limit);
    return std::string(c.pass ? "PASS " : "FAIL ") + c.name + buf;
}

// ---- sweeps ----

struct SweepPoint {
    io::json value;
    fs::path dir;
    int status{0};  // 0 ok, 2 validation, 3 solver
    std::string error;
    RunReport report;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    int status() const {
        int s = 0;
        for (const auto& p : points) s = std::max(s, p.status);
        return s;
    }
};

// Mode runners: each writes its artifacts under out and returns the module-level checks.
RunReport run_design(const ScenarioConfig& c, const fs::path& out);
RunReport run_simulate(const ScenarioConfig& c, const fs::path& out);
RunReport run_solve_widths(const ScenarioConfig& c, const fs::path& out);
RunReport run_multi_env(const ScenarioConfig& c, const fs::path& out);
RunReport run_network(const ScenarioConfig& c, const fs::path& out);
RunReport run_oracle_check(const ScenarioConfig& c, const fs::path& out);
RunReport run_scenario(const ScenarioConfig& c, const fs::path& out);

// One point per value under out/point_k; each point is a pure computation writing only under its own directory.
SweepResult sweep(const json& base, const fs::path& base_dir, const std::string& axis, const std::vector<json>& values,
                  std::size_t workers, const fs::path& out);

}  // namespace nmphoton
