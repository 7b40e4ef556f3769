// wavepackets.hpp — target single-photon shapes, normalization constants and admissibility

#pragma once

#include <cmath>
#include <complex>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nmphoton/errors.hpp"
#include "nmphoton/expsum.hpp"
#include "nmphoton/grid.hpp"
#include "nmphoton/kernels.hpp"

namespace nmphoton {

enum class ShapeKind { Sin3, T3Sin3, Sin4, Tabulated };

inline std::string to_string(ShapeKind k) {
    switch (k) {
        case ShapeKind::Sin3: return "sin3";
        case ShapeKind::T3Sin3: return "t3sin3";
        case ShapeKind::Sin4: return "sin4";
        case ShapeKind::Tabulated: return "tabulated";
    }
    return "?";
}

struct WavepacketSpec {
    ShapeKind kind{ShapeKind::Sin3};
    double B{2.0};
    double Gamma{0.5};
    double weight{1.0};    // ∫|α|² dt
    double phase_ce{0.0};  // α → α e^{-i c_e t}
    std::shared_ptr<const ComplexSignal> table;  // Tabulated only

    void validate() const {
        if (kind == ShapeKind::Tabulated) {
            if (!table) throw ValidationError("wavepacket: tabulated shape without samples");
            if (!table->all_finite()) throw ValidationError("wavepacket: tabulated samples not finite");
            return;
        }
        if (!(B > 0.0) || !std::isfinite(B)) throw ValidationError("wavepacket: B must be positive");
        if (!(Gamma > 0.0) || !std::isfinite(Gamma)) throw ValidationError("wavepacket: Gamma must be positive");
        if (!(weight > 0.0 && weight <= 1.0)) throw ValidationError("wavepacket: weight must be in (0,1]");
        if (!std::isfinite(phase_ce)) throw ValidationError("wavepacket: phase_ce not finite");
    }
};

// Closed-form constants. A1 = A2 normalize e^{-Γt}sin³Bt to 1; A3 normalizes t³e^{-Γt}sin³Bt to ½
// (the two-channel pair); A4 normalizes e^{-Γt}sin⁴Bt to ⅓; E1 = A1√ν₁. d1..d4 are signed
// auxiliaries of A3; a1, a2 enter the width relations and need λ₁.
struct NormalizationConstants {
    double A1{}, A2{}, A3{}, A4{}, E1{};
    double d1{}, d2{}, d3{}, d4{};
    double a1{}, a2{};
};

inline NormalizationConstants normalization_constants(double B, double G, double nu1 = 1.0, double lambda1 = 0.0) {
    NormalizationConstants c;
    const double B2 = B * B, G2 = G * G;
    const double p1 = B2 + G2, p4 = 4 * B2 + G2, p9 = 9 * B2 + G2;
    c.A1 = 2.0 * std::sqrt(2.0 * (36 * std::pow(B, 6) * G + 49 * std::pow(B, 4) * std::pow(G, 3) +
                                  14 * B2 * std::pow(G, 5) + std::pow(G, 7))) /
           (3.0 * std::sqrt(5.0) * std::pow(B, 3));
    c.A2 = c.A1;
    c.E1 = c.A1 * std::sqrt(nu1);
    c.d1 = 6 / std::pow(p4, 4) - 1 / std::pow(p9, 4) - 15 / std::pow(p1, 4);
    c.d2 = 192 * std::pow(B, 6) * (5 / std::pow(p1, 7) - 128 / std::pow(p4, 7) + 243 / std::pow(p9, 7));
    c.d3 = 32 / std::pow(p4, 6) - 27 / std::pow(p9, 6) - 5 / std::pow(p1, 6);
    c.d4 = 5 / std::pow(p1, 5) - 8 / std::pow(p4, 5) + 3 / std::pow(p9, 5);
    c.A3 = 2.0 * std::sqrt(2.0) /
           (45.0 * std::sqrt(1.0 / (72.0 * std::pow(G, 7)) +
                             G * (c.d1 + c.d2 + 240 * std::pow(B, 4) * c.d3 + 72 * B2 * c.d4) / 720.0));
    c.A4 = 2.0 *
           std::sqrt(576 * std::pow(B, 8) * G + 820 * std::pow(B, 6) * std::pow(G, 3) +
                     273 * std::pow(B, 4) * std::pow(G, 5) + 30 * B2 * std::pow(G, 7) + std::pow(G, 9)) /
           (3.0 * std::sqrt(105.0) * std::pow(B, 4));
    const double l2 = lambda1 * lambda1;
    c.a1 = 5 * p1 * p9 + (41 * B2 + 29 * G2) * l2;
    c.a2 = 9 * B2 + G2 + 5 * l2;
    return c;
}

// Amplitude such that ∫|α|² = weight.
inline double normalization_constant(const WavepacketSpec& s) {
    const auto c = normalization_constants(s.B, s.Gamma);
    switch (s.kind) {
        case ShapeKind::Sin3: return c.A1 * std::sqrt(s.weight);
        case ShapeKind::T3Sin3: return c.A3 * std::sqrt(2.0 * s.weight);
        case ShapeKind::Sin4: return c.A4 * std::sqrt(3.0 * s.weight);
        case ShapeKind::Tabulated: break;
    }
    throw ValidationError("normalization_constant: tabulated shapes carry their own scale");
}

// e^{-Γt} sin³(Bt) (times t³ for T3Sin3) or e^{-Γt} sin⁴(Bt), amplitude 1, with phase.
inline ExpSum shape_expsum(ShapeKind kind, double B, double G, double ce, double amp) {
    const cplx base(-G, -ce);
    const cplx i2 = 2.0 * I;
    if (kind == ShapeKind::Sin3 || kind == ShapeKind::T3Sin3) {
        const int p = kind == ShapeKind::T3Sin3 ? 3 : 0;
        // sin³x = (3 sin x - sin 3x)/4
        return ExpSum({{amp * 0.75 / i2, p, base + I * B},
                       {-amp * 0.75 / i2, p, base - I * B},
                       {-amp * 0.25 / i2, p, base + 3.0 * I * B},
                       {amp * 0.25 / i2, p, base - 3.0 * I * B}});
    }
    if (kind == ShapeKind::Sin4) {
        // sin⁴x = (3 - 4 cos 2x + cos 4x)/8
        return ExpSum({{amp * 3.0 / 8.0, 0, base},
                       {-amp * 0.25, 0, base + 2.0 * I * B},
                       {-amp * 0.25, 0, base - 2.0 * I * B},
                       {amp / 16.0, 0, base + 4.0 * I * B},
                       {amp / 16.0, 0, base - 4.0 * I * B}});
    }
    throw ValidationError("shape_expsum: tabulated shape has no analytic form");
}

inline ExpSum analytic_form(const WavepacketSpec& s) {
    s.validate();
    return shape_expsum(s.kind, s.B, s.Gamma, s.phase_ce, normalization_constant(s));
}

// A target output shape: exact exponential sum or samples on a fixed grid.
class Waveform {
public:
    static Waveform analytic(ExpSum e) {
        Waveform w;
        w.expsum_ = std::move(e);
        return w;
    }
    static Waveform sampled(ComplexSignal s) {
        if (!s.all_finite()) throw ValidationError("waveform: samples not finite");
        Waveform w;
        w.samples_ = std::move(s);
        return w;
    }

    bool is_analytic() const { return expsum_.has_value(); }
    const ExpSum& expsum() const { return *expsum_; }
    const ComplexSignal& samples() const { return *samples_; }

    // Derivative of order 0..3 on the grid; sampled data uses fourth-order differences.
    ComplexSignal sample(const TimeGrid& g, int order = 0) const {
        if (order < 0 || order > 3) throw ValidationError("waveform: derivative order must be 0..3");
        if (expsum_) return expsum_->derivative(order).sample(g);
        if (!(samples_->grid == g)) throw ValidationError("waveform: tabulated samples are not on the run grid");
        if (order > 0 && samples_->size() < 3)
            throw ValidationError("waveform: need at least 3 samples to differentiate");
        ComplexSignal s = *samples_;
        for (int i = 0; i < order; ++i) s = differentiate(s, DiffOrder::Fourth);
        return s;
    }

    // Value and first two derivatives at t = 0.
    std::array<cplx, 3> at_origin() const {
        if (expsum_) return {(*expsum_)(0.0), expsum_->derivative(1)(0.0), expsum_->derivative(2)(0.0)};
        const auto& g = samples_->grid;
        return {(*samples_)[0], sample(g, 1)[0], sample(g, 2)[0]};
    }

private:
    std::optional<ExpSum> expsum_;
    std::optional<ComplexSignal> samples_;
};

inline Waveform make_waveform(const WavepacketSpec& s) {
    s.validate();
    if (s.kind == ShapeKind::Tabulated) return Waveform::sampled(*s.table);
    return Waveform::analytic(analytic_form(s));
}

inline ComplexSignal evaluate(const WavepacketSpec& s, int order, const TimeGrid& g) {
    return make_waveform(s).sample(g, order);
}

struct AdmissibilityReport {
    std::array<cplx, 3> boundary{};  // α(0), α̇(0), α̈(0)
    cplx beta_b0{}, dbeta_b0{};
    double tolerance{1e-9};
    bool pass{false};
};

inline AdmissibilityReport check_admissible(const Waveform& w, const EnvironmentSpec& env) {
    AdmissibilityReport r;
    r.boundary = w.at_origin();
    const double norm = env.lambda * std::sqrt(env.gamma);
    r.beta_b0 = (r.boundary[1] + env.lambda * r.boundary[0]) / norm;
    r.dbeta_b0 = (r.boundary[2] + env.lambda * r.boundary[1]) / norm;
    r.pass = std::abs(r.boundary[0]) <= r.tolerance && std::abs(r.boundary[1]) <= r.tolerance &&
             std::abs(r.boundary[2]) <= r.tolerance;
    return r;
}

inline AdmissibilityReport check_admissible(const WavepacketSpec& s, const EnvironmentSpec& env) {
    return check_admissible(make_waveform(s), env);
}

// ∫_T^∞ |α|² for analytic shapes.
inline double tail_mass(const WavepacketSpec& s, double T) { return analytic_form(s).tail_norm_squared(T); }

// Grid with the same dt, extended (never shortened) until the neglected tail mass is below tol.
inline TimeGrid extend_for_tail(const WavepacketSpec& s, const TimeGrid& g, double tol = 1e-8) {
    if (s.kind == ShapeKind::Tabulated) return g;
    const ExpSum e = analytic_form(s);
    double T = g.t_max();
    while (e.tail_norm_squared(T) >= tol) T += 1.0;
    if (T <= g.t_max()) return g;
    return TimeGrid::covering(T, g.dt);
}

// Two or three columns: t, Re α [, Im α]. Optional header line. Must start at 0 with uniform step.
inline WavepacketSpec load_tabulated_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open tabulated shape file: " + path);
    std::vector<double> ts;
    std::vector<cplx> vs;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> cols;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t pos = 0;
                cols.push_back(std::stod(cell, &pos));
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;
            }
            throw ValidationError("tabulated shape: non-numeric row in " + path);
        }
        first = false;
        if (cols.size() < 2 || cols.size() > 3) throw ValidationError("tabulated shape: expected 2 or 3 columns");
        ts.push_back(cols[0]);
        vs.emplace_back(cols[1], cols.size() == 3 ? cols[2] : 0.0);
    }
    if (ts.size() < 2) throw ValidationError("tabulated shape: need at least 2 rows");
    if (std::abs(ts[0]) > 1e-12) throw ValidationError("tabulated shape: first time must be 0");
    const double dt = ts[1] - ts[0];
    for (std::size_t i = 1; i < ts.size(); ++i)
        if (std::abs(ts[i] - dt * double(i)) > 1e-9 * std::max(1.0, ts[i]))
            throw ValidationError("tabulated shape: non-uniform time column");
    WavepacketSpec s;
    s.kind = ShapeKind::Tabulated;
    s.table = std::make_shared<const ComplexSignal>(TimeGrid(dt, ts.size()), std::move(vs));
    return s;
}

}  // namespace nmphoton
