// forward.hpp — forward integration of the driven Λ-atom/cavity amplitudes (memory-kernel and memoryless)

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "nmphoton/errors.hpp"
#include "nmphoton/grid.hpp"
#include "nmphoton/kernels.hpp"

namespace nmphoton {

struct SystemParams {
    double g_c{30.0 * std::numbers::pi};
    int n_atoms{40};
    double gamma_prime{6.0 * std::numbers::pi};
    double delta1{0.0};
    double delta2{0.0};

    double coupling() const { return g_c * std::sqrt(double(n_atoms)); }
    double delta_tilde() const { return delta2 - delta1; }

    // g_c = 0 is accepted by the forward solvers (bare-cavity runs); the designer requires g_c > 0.
    void validate(bool allow_zero_coupling = false) const {
        if (!std::isfinite(g_c) || g_c < 0.0 || (!allow_zero_coupling && g_c == 0.0))
            throw ValidationError("params: g_c must be positive");
        if (n_atoms < 1) throw ValidationError("params: n_atoms must be >= 1");
        if (!(gamma_prime >= 0.0) || !std::isfinite(gamma_prime))
            throw ValidationError("params: gamma_prime must be non-negative");
        if (!std::isfinite(delta1) || !std::isfinite(delta2)) throw ValidationError("params: detunings not finite");
    }
};

struct InitialState {
    cplx beta_b{0.0};
    cplx beta_c{1.0};
    cplx beta_a{0.0};

    static InitialState excited_c() { return {}; }
    static InitialState vacuum() { return {0.0, 0.0, 0.0}; }
    double norm() const { return std::norm(beta_b) + std::norm(beta_c) + std::norm(beta_a); }
};

struct AmplitudeTrajectory {
    ComplexSignal beta_b, beta_c, beta_a;

    RealSignal internal_norm() const {
        RealSignal r(beta_b.grid);
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] = std::norm(beta_b[i]) + std::norm(beta_c[i]) + std::norm(beta_a[i]);
        return r;
    }
    RealSignal rho_c() const { return abs2(beta_c); }
};

struct ChannelFields {
    std::vector<ComplexSignal> alpha_in, alpha_out;
};

struct SimulationResult {
    AmplitudeTrajectory traj;
    ChannelFields fields;
    BathKind kind{BathKind::NonMarkovian};
    double initial_norm{1.0};
    // Channel-j excitation still travelling towards the detector at the final time, |y_j(T)|²/(2λ_j)
    // with y_j the zero-input part of the output; zero for memoryless runs.
    std::vector<double> in_flight;
};

struct ForwardOptions {
    InitialState init{};
    bool history_quadrature{false};  // O(n²) evaluation of the memory integral, cross-check only
};

namespace detail {

inline void check_inputs(const TimeGrid& grid, const ComplexSignal& drive, const std::vector<ComplexSignal>& inputs,
                         std::size_t n_channels) {
    grid.validate();
    if (grid.n_samples < 4) throw ValidationError("forward: need at least 4 grid samples");
    if (!(drive.grid == grid)) throw ValidationError("forward: drive is not on the run grid");
    if (!drive.all_finite()) throw ValidationError("forward: drive not finite");
    if (!inputs.empty() && inputs.size() != n_channels)
        throw ValidationError("forward: need one input signal per channel (or none)");
    for (const auto& in : inputs) {
        if (!(in.grid == grid)) throw ValidationError("forward: input field is not on the run grid");
        if (!in.all_finite()) throw ValidationError("forward: input field not finite");
    }
}

inline bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

// A drive spike (ρ_c → 0 just before a design truncates) can leave the RK4 stability range at the grid step.
// Such steps are split so that |Ω|·h_sub ≤ 0.1.
// Drive spikes: |Ω|h_sub <= 0.1 once |Ω|h > 0.5. Collective coupling: g h_sub <= 0.35, since free b <-> a
// oscillation at g√N·dt = 0.6 (N=40, dt=1e-3) costs ~2e-3 of norm over a few µs.
inline std::size_t substeps(cplx om0, cplx omh, cplx om1, double h, double g = 0.0) {
    const double w = std::max({std::abs(om0), std::abs(omh), std::abs(om1)}) * h;
    const std::size_t n_drive = w > 0.5 ? std::size_t(std::ceil(w / 0.1)) : 1;
    const std::size_t n_coupling = g * h > 0.35 ? std::size_t(std::ceil(g * h / 0.35)) : 1;
    return std::max(n_drive, n_coupling);
}

// Quadratic through (0, f0), (½, fh), (1, f1); exact at the three nodes.
inline cplx quad3(cplx f0, cplx fh, cplx f1, double s) {
    if (s == 0.0) return f0;
    if (s == 0.5) return fh;
    if (s == 1.0) return f1;
    return f0 * ((1.0 - s) * (1.0 - 2.0 * s)) + fh * (4.0 * s * (1.0 - s)) + f1 * (s * (2.0 * s - 1.0));
}

// A(t) = ∫_t^T k(τ-t) α_in(τ) dτ: the input term with the kernel's support τ ≥ t.
inline ComplexSignal advanced_input_term(const ComplexSignal& alpha_in, const EnvironmentSpec& env) {
    const auto n = alpha_in.size();
    ComplexSignal rev(alpha_in.grid);
    for (std::size_t i = 0; i < n; ++i) rev[i] = alpha_in[n - 1 - i];
    const auto conv = convolve_exponential(rev, env.lambda, env.lambda * std::sqrt(env.gamma), Interp::Cubic);
    ComplexSignal out(alpha_in.grid);
    for (std::size_t i = 0; i < n; ++i) out[i] = conv[n - 1 - i];
    return out;
}

}  // namespace detail

// Memory-kernel solver. Each ∫F_j β_b becomes z_j with ż_j = -λ_j z_j + (λ_jγ_j/2)β_b; RK4 on (β_b, β_c, β_a, z).
inline SimulationResult simulate_nonmarkovian(const SystemParams& p, const std::vector<EnvironmentSpec>& envs,
                                              const ComplexSignal& drive, const std::vector<ComplexSignal>& inputs,
                                              const TimeGrid& grid, const ForwardOptions& opt = {}) {
    p.validate(true);
    if (envs.empty()) throw ValidationError("forward: need at least one environment");
    for (const auto& e : envs) e.validate();
    detail::check_inputs(grid, drive, inputs, envs.size());

    const std::size_t M = envs.size();
    const std::size_t n = grid.n_samples;
    const double h = grid.dt;
    const double g = p.coupling();

    // Summed advanced input term and its midpoint values.
    ComplexSignal drive_in(grid);
    for (std::size_t j = 0; j < inputs.size(); ++j) drive_in += detail::advanced_input_term(inputs[j], envs[j]);

    SimulationResult res;
    res.kind = BathKind::NonMarkovian;
    res.traj = {ComplexSignal(grid), ComplexSignal(grid), ComplexSignal(grid)};
    res.initial_norm = opt.init.norm();

    std::vector<cplx> y(3 + M), k1(3 + M), k2(3 + M), k3(3 + M), k4(3 + M), tmp(3 + M);
    y[0] = opt.init.beta_b;
    y[1] = opt.init.beta_c;
    y[2] = opt.init.beta_a;

    // History-quadrature mode keeps z out of the state and re-evaluates ∫F β_b from stored samples.
    const bool hist = opt.history_quadrature;
    auto history_memory = [&](std::size_t step, double tau_extra, cplx bb_now) {
        // ∫_0^{t_step + tau_extra} ΣF_j(t-τ)β_b(τ)dτ by trapezoid over samples plus the partial step.
        const double t = grid.t(step) + tau_extra;
        cplx acc{};
        for (const auto& e : envs) {
            cplx s{};
            auto w = [&](double tau) { return memory_F(e, t - tau); };
            for (std::size_t i = 0; i < step; ++i)
                s += 0.5 * h * (w(grid.t(i)) * res.traj.beta_b[i] + w(grid.t(i + 1)) * res.traj.beta_b[i + 1]);
            if (tau_extra > 0.0) s += 0.5 * tau_extra * (w(grid.t(step)) * res.traj.beta_b[step] + w(t) * bb_now);
            acc += s;
        }
        return acc;
    };

    auto rhs = [&](double t, cplx om, cplx ain, const std::vector<cplx>& s, std::vector<cplx>& d, std::size_t step,
                   double tau_extra) {
        const cplx bb = s[0], bc = s[1], ba = s[2];
        cplx mem{};
        if (hist) mem = history_memory(step, tau_extra, bb);
        else
            for (std::size_t j = 0; j < M; ++j) mem += s[3 + j];
        d[0] = -I * g * std::exp(-I * p.delta2 * t) * ba - mem + ain;
        d[1] = -I * std::conj(om) * std::exp(-I * p.delta1 * t) * ba;
        d[2] = -I * g * std::exp(I * p.delta2 * t) * bb - p.gamma_prime * ba - I * om * std::exp(I * p.delta1 * t) * bc;
        for (std::size_t j = 0; j < M; ++j)
            d[3 + j] = hist ? cplx{} : -envs[j].lambda * s[3 + j] + 0.5 * envs[j].lambda * envs[j].gamma * bb;
    };

    auto store = [&](std::size_t i) {
        res.traj.beta_b[i] = y[0];
        res.traj.beta_c[i] = y[1];
        res.traj.beta_a[i] = y[2];
    };
    store(0);
    using detail::quad3;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double t = grid.t(i);
        const cplx om0 = drive[i], om1 = drive[i + 1], omh = midpoint_value(drive, i);
        const cplx a0 = drive_in[i], a1 = drive_in[i + 1], ah = midpoint_value(drive_in, i);
        const std::size_t nsub = detail::substeps(om0, omh, om1, h, g);
        const double hs = h / double(nsub);
        for (std::size_t sub = 0; sub < nsub; ++sub) {
            const double s0 = double(sub) / double(nsub), sh = (sub + 0.5) / double(nsub), s1 = (sub + 1.0) / double(nsub);
            rhs(t + s0 * h, quad3(om0, omh, om1, s0), quad3(a0, ah, a1, s0), y, k1, i, s0 * h);
            for (std::size_t q = 0; q < y.size(); ++q) tmp[q] = y[q] + 0.5 * hs * k1[q];
            rhs(t + sh * h, quad3(om0, omh, om1, sh), quad3(a0, ah, a1, sh), tmp, k2, i, sh * h);
            for (std::size_t q = 0; q < y.size(); ++q) tmp[q] = y[q] + 0.5 * hs * k2[q];
            rhs(t + sh * h, quad3(om0, omh, om1, sh), quad3(a0, ah, a1, sh), tmp, k3, i, sh * h);
            for (std::size_t q = 0; q < y.size(); ++q) tmp[q] = y[q] + hs * k3[q];
            rhs(t + s1 * h, quad3(om0, omh, om1, s1), quad3(a0, ah, a1, s1), tmp, k4, i, s1 * h);
            for (std::size_t q = 0; q < y.size(); ++q) y[q] += hs / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
        }
        for (std::size_t q = 0; q < 3; ++q)
            if (!detail::finite(y[q]) || std::abs(y[q]) > 1e6)
                throw SolverError("non-markovian solver: amplitude diverged", i + 1, grid.t(i + 1));
        store(i + 1);
    }

    res.fields.alpha_in.resize(M, ComplexSignal(grid));
    res.fields.alpha_out.resize(M, ComplexSignal(grid));
    for (std::size_t j = 0; j < M; ++j) {
        if (!inputs.empty()) res.fields.alpha_in[j] = inputs[j];
        const auto conv = convolve_exponential(res.traj.beta_b, envs[j].lambda,
                                               envs[j].lambda * std::sqrt(envs[j].gamma), Interp::Cubic);
        res.fields.alpha_out[j] = conv - res.fields.alpha_in[j];
        res.in_flight.push_back(std::norm(conv[n - 1]) / (2.0 * envs[j].lambda));
    }
    return res;
}

// Memoryless limit: damping Σ½γ_jβ_b, input coupling Σ√γ_j α_in_j, α_out = -α_in + √γ β_b.
inline SimulationResult simulate_markovian(const SystemParams& p, const std::vector<double>& gammas,
                                           const ComplexSignal& drive, const std::vector<ComplexSignal>& inputs,
                                           const TimeGrid& grid, const InitialState& init = {}) {
    p.validate(true);
    if (gammas.empty()) throw ValidationError("forward: need at least one channel");
    for (double gm : gammas)
        if (!(gm > 0.0)) throw ValidationError("forward: channel rates must be positive");
    detail::check_inputs(grid, drive, inputs, gammas.size());

    const std::size_t n = grid.n_samples;
    const double h = grid.dt;
    const double g = p.coupling();
    double half_gamma = 0.0;
    for (double gm : gammas) half_gamma += 0.5 * gm;
    ComplexSignal drive_in(grid);
    for (std::size_t j = 0; j < inputs.size(); ++j) {
        auto s = inputs[j];
        s *= cplx(std::sqrt(gammas[j]));
        drive_in += s;
    }

    SimulationResult res;
    res.kind = BathKind::Markovian;
    res.traj = {ComplexSignal(grid), ComplexSignal(grid), ComplexSignal(grid)};
    res.initial_norm = init.norm();
    std::array<cplx, 3> y{init.beta_b, init.beta_c, init.beta_a}, k1{}, k2{}, k3{}, k4{}, tmp{};
    auto rhs = [&](double t, cplx om, cplx ain, const std::array<cplx, 3>& s, std::array<cplx, 3>& d) {
        d[0] = -I * g * std::exp(-I * p.delta2 * t) * s[2] - half_gamma * s[0] + ain;
        d[1] = -I * std::conj(om) * std::exp(-I * p.delta1 * t) * s[2];
        d[2] = -I * g * std::exp(I * p.delta2 * t) * s[0] - p.gamma_prime * s[2] - I * om * std::exp(I * p.delta1 * t) * s[1];
    };
    auto store = [&](std::size_t i) {
        res.traj.beta_b[i] = y[0];
        res.traj.beta_c[i] = y[1];
        res.traj.beta_a[i] = y[2];
    };
    store(0);
    using detail::quad3;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double t = grid.t(i);
        const cplx om0 = drive[i], om1 = drive[i + 1], omh = midpoint_value(drive, i);
        const cplx a0 = drive_in[i], a1 = drive_in[i + 1], ah = midpoint_value(drive_in, i);
        const std::size_t nsub = detail::substeps(om0, omh, om1, h, g);
        const double hs = h / double(nsub);
        for (std::size_t sub = 0; sub < nsub; ++sub) {
            const double s0 = double(sub) / double(nsub), sh = (sub + 0.5) / double(nsub), s1 = (sub + 1.0) / double(nsub);
            rhs(t + s0 * h, quad3(om0, omh, om1, s0), quad3(a0, ah, a1, s0), y, k1);
            for (int q = 0; q < 3; ++q) tmp[q] = y[q] + 0.5 * hs * k1[q];
            rhs(t + sh * h, quad3(om0, omh, om1, sh), quad3(a0, ah, a1, sh), tmp, k2);
            for (int q = 0; q < 3; ++q) tmp[q] = y[q] + 0.5 * hs * k2[q];
            rhs(t + sh * h, quad3(om0, omh, om1, sh), quad3(a0, ah, a1, sh), tmp, k3);
            for (int q = 0; q < 3; ++q) tmp[q] = y[q] + hs * k3[q];
            rhs(t + s1 * h, quad3(om0, omh, om1, s1), quad3(a0, ah, a1, s1), tmp, k4);
            for (int q = 0; q < 3; ++q) y[q] += hs / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
        }
        for (int q = 0; q < 3; ++q) {
            if (!detail::finite(y[q]) || std::abs(y[q]) > 1e6)
                throw SolverError("markovian solver: amplitude diverged", i + 1, grid.t(i + 1));
        }
        store(i + 1);
    }
    res.fields.alpha_in.resize(gammas.size(), ComplexSignal(grid));
    res.fields.alpha_out.resize(gammas.size(), ComplexSignal(grid));
    for (std::size_t j = 0; j < gammas.size(); ++j) {
        if (!inputs.empty()) res.fields.alpha_in[j] = inputs[j];
        for (std::size_t i = 0; i < n; ++i)
            res.fields.alpha_out[j][i] = -res.fields.alpha_in[j][i] + std::sqrt(gammas[j]) * res.traj.beta_b[i];
        res.in_flight.push_back(0.0);
    }
    return res;
}

inline double integral4(const RealSignal& s) { return cumulative_integral4(s).samples.back(); }

struct NormAudit {
    double internal{0.0};  // |β_b|²+|β_c|²+|β_a|² at T
    double emitted{0.0};   // Σ_j ∫|α_out_j|²
    double loss{0.0};      // 2γ′∫|β_a|²
    double supplied{0.0};  // initial norm + Σ_j ∫|α_in_j|²
    double in_flight{0.0};
    double residual{0.0};  // internal + emitted + loss - supplied
    double tolerance{1e-3};
    bool flagged{false};
};

inline NormAudit norm_audit(const SimulationResult& r, double gamma_prime, double tolerance = 1e-3) {
    NormAudit a;
    a.tolerance = tolerance;
    const auto n = r.traj.beta_b.size();
    a.internal = std::norm(r.traj.beta_b[n - 1]) + std::norm(r.traj.beta_c[n - 1]) + std::norm(r.traj.beta_a[n - 1]);
    for (const auto& o : r.fields.alpha_out) a.emitted += integral4(abs2(o));
    a.loss = 2.0 * gamma_prime * integral4(abs2(r.traj.beta_a));
    a.supplied = r.initial_norm;
    for (const auto& in : r.fields.alpha_in) a.supplied += integral4(abs2(in));
    for (double f : r.in_flight) a.in_flight += f;
    a.residual = a.internal + a.emitted + a.loss - a.supplied;
    a.flagged = std::abs(a.residual) > tolerance;
    return a;
}

}  // namespace nmphoton
