// presets.hpp — fixed figure scenarios fig2..fig13, run through the scenario modes

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nmphoton/runner.hpp"

namespace nmphoton {

struct PresetPoint {
    std::string name;  // subdirectory; empty for single-point figures
    json config;
};

struct Preset {
    std::string id;
    std::string title;
    std::vector<PresetPoint> points;
};

struct FigureRun {
    RunReport report;
    int status{0};
};

const std::vector<std::string>& preset_ids();

// λ values of the fig4 population surface and its monotonicity check.
const std::vector<double>& fig4_lambdas();

Preset make_preset(const std::string& id);

// Runs every point of a preset. Only grid.dt / grid.t_max may be overridden.
FigureRun run_figure(const std::string& id, std::optional<double> dt, std::optional<double> t_max, const fs::path& out,
                     std::size_t workers = 1);

}  // namespace nmphoton
