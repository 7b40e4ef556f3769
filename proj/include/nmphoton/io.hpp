// io.hpp — CSV and JSON emission for trajectories, designs, width reports and network nodes

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmphoton/designer.hpp"
#include "nmphoton/errors.hpp"
#include "nmphoton/forward.hpp"
#include "nmphoton/grid.hpp"
#include "nmphoton/multi_env.hpp"
#include "nmphoton/network.hpp"

namespace nmphoton::io {

using json = nlohmann::ordered_json;

// 17 significant digits, '.' decimal regardless of locale.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    for (char& c : s)
        if (c == ',') c = '.';
    return s;
}

class CsvTable {
public:
    explicit CsvTable(const TimeGrid& g) : grid_(g) {
        header_.push_back("t");
        std::vector<double> t(g.n_samples);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = g.t(i);
        cols_.push_back(std::move(t));
    }

    void add(const std::string& name, const RealSignal& s) {
        if (!(s.grid == grid_)) throw ValidationError("csv: column " + name + " on a different grid");
        header_.push_back(name);
        cols_.push_back(s.samples);
    }

    void add(const std::string& name, const ComplexSignal& s) {
        if (!(s.grid == grid_)) throw ValidationError("csv: column " + name + " on a different grid");
        std::vector<double> re(s.size()), im(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            re[i] = s[i].real();
            im[i] = s[i].imag();
        }
        header_.push_back("re_" + name);
        cols_.push_back(std::move(re));
        header_.push_back("im_" + name);
        cols_.push_back(std::move(im));
    }

    void write(const std::filesystem::path& path) const {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ValidationError("cannot write " + path.string());
        for (std::size_t c = 0; c < header_.size(); ++c) out << (c ? "," : "") << header_[c];
        out << '\n';
        for (std::size_t i = 0; i < grid_.n_samples; ++i) {
            for (std::size_t c = 0; c < cols_.size(); ++c) out << (c ? "," : "") << format_number(cols_[c][i]);
            out << '\n';
        }
    }

private:
    TimeGrid grid_;
    std::vector<std::string> header_;
    std::vector<std::vector<double>> cols_;
};

inline void write_json(const std::filesystem::path& path, const json& j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

// t, β_b, β_c, β_a, then per channel α_in_j, α_out_j, |α_out_j|², then ρ_c = |β_c|².
inline CsvTable trajectory_table(const SimulationResult& r) {
    CsvTable t(r.traj.beta_b.grid);
    t.add("beta_b", r.traj.beta_b);
    t.add("beta_c", r.traj.beta_c);
    t.add("beta_a", r.traj.beta_a);
    for (std::size_t j = 0; j < r.fields.alpha_out.size(); ++j) {
        const std::string k = std::to_string(j + 1);
        t.add("alpha_in_" + k, r.fields.alpha_in[j]);
        t.add("alpha_out_" + k, r.fields.alpha_out[j]);
        t.add("abs2_alpha_out_" + k, abs2(r.fields.alpha_out[j]));
    }
    t.add("rho_c", abs2(r.traj.beta_c));
    return t;
}

// t, Ω, |Ω|, arg Ω, ρ_c, β_b, β̃_a.
inline CsvTable design_table(const DesignResult& d) {
    const auto& g = d.drive.grid;
    CsvTable t(g);
    RealSignal mod(g), arg(g);
    for (std::size_t i = 0; i < g.n_samples; ++i) {
        mod[i] = std::abs(d.drive[i]);
        arg[i] = std::arg(d.drive[i]);
    }
    t.add("omega", d.drive);
    t.add("abs_omega", mod);
    t.add("arg_omega", arg);
    t.add("rho_c", d.rho_c);
    t.add("beta_b", d.beta_b);
    t.add("beta_a_tilde", d.beta_a_tilde);
    return t;
}

inline json design_summary(const DesignResult& d) {
    return {{"bath", to_string(d.kind)},
            {"method", d.method},
            {"peak_abs_omega", d.peak_drive},
            {"truncated", d.truncated},
            {"truncation_time", d.truncation_time},
            {"valid_samples", d.valid_samples},
            {"emitted_fraction", d.emitted_fraction},
            {"chain_mismatch", d.chain_mismatch}};
}

inline json audit_summary(const NormAudit& a) {
    return {{"internal", a.internal}, {"emitted", a.emitted},   {"loss", a.loss},        {"supplied", a.supplied},
            {"in_flight", a.in_flight}, {"residual", a.residual}, {"flagged", a.flagged}};
}

inline json width_report(const WidthSolveReport& r) {
    json ch = json::array();
    for (const auto& c : r.channels) {
        json e = {{"channel", c.channel + 1},
                  {"roots", c.roots},
                  {"relative_residuals", c.residuals},
                  {"sign_changes", c.sign_changes},
                  {"brackets", c.brackets},
                  {"status", c.status}};
        e["chosen"] = c.chosen ? json(*c.chosen) : json(nullptr);
        ch.push_back(std::move(e));
    }
    return {{"inputs",
             {{"lambda1", r.lambda1},
              {"B", r.B},
              {"Gamma", r.Gamma},
              {"nu", r.nu},
              {"mu", r.mu},
              {"search", {r.search_min, r.search_max}}}},
            {"channels", std::move(ch)}};
}

// node<q>_<field>.csv with columns t, re_<field>, im_<field>; q is 1-based.
inline void write_node(const std::filesystem::path& dir, std::size_t q, const NodeTrajectory& n) {
    const std::string p = "node" + std::to_string(q) + "_";
    auto one = [&](const std::string& field, const ComplexSignal& s) {
        CsvTable t(s.grid);
        t.add(field, s);
        t.write(dir / (p + field + ".csv"));
    };
    one("beta_b", n.beta_b);
    one("beta_c", n.beta_c);
    one("beta_a", n.beta_a);
    one("alpha_in_1", n.alpha_in_1);
    one("alpha_out_1", n.alpha_out_1);
    if (n.has_second) one("alpha_out_2", n.alpha_out_2);
}

}  // namespace nmphoton::io
