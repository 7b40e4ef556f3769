// oracle.hpp — brute-force discretized-continuum simulation, the reference for the kernel-reduced solvers

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "nmphoton/errors.hpp"
#include "nmphoton/forward.hpp"
#include "nmphoton/grid.hpp"
#include "nmphoton/kernels.hpp"

namespace nmphoton {

struct DiscretizedBathConfig {
    std::size_t n_modes{4001};
    double window_factor{40.0};  // W = window_factor · max_j λ_j unless window > 0
    double window{0.0};
    InitialState init{};
    std::vector<ComplexSignal> inputs;  // optional incoming fields, one per channel
};

struct OracleResult {
    SimulationResult sim;            // amplitudes and reconstructed α_in / α_out
    RealSignal bath_population;      // Σ_{j,m} |a_jm(t)|²
    RealSignal loss;                 // 2γ′∫_0^t |β_a|²
    RealSignal total;                // internal + bath + loss
    double supplied{1.0};            // initial internal norm + Σ|a_jm(0)|²
    double window{0.0}, delta_omega{0.0}, recurrence_time{0.0};
    std::vector<double> omega;
    std::vector<std::vector<cplx>> final_modes;  // a_jm(T), mode amplitudes scaled by √Δω
    std::vector<ComplexSignal> alpha_out_instant;  // (2π)^{-1/2}√Δω Σ_m a_m(t), converges only as 1/W
};

// Modes ω_m uniform on [-W, W]; a_m = √Δω α_ω, coupling c_m = √Δω v(ω_m).
// ȧ_m = -iω_m a_m + c_m β_b and β̇_b gains -Σ c_m* a_m. The output is read off the final-time modes
// propagated freely back, α_out(t) = (2π)^{-1/2}√Δω Σ_m a_m(T) e^{iω_m(T-t)}; the instantaneous sum
// Σ_m a_m(t) sees only past emission and carries an O(√γ/W) error from the truncated 1/ω tail of v.
inline OracleResult simulate_discretized_bath(const SystemParams& p, const std::vector<EnvironmentSpec>& envs,
                                              const ComplexSignal& drive, const DiscretizedBathConfig& cfg,
                                              const TimeGrid& grid) {
    p.validate(true);
    if (envs.empty()) throw ValidationError("oracle: need at least one environment");
    for (const auto& e : envs) e.validate();
    detail::check_inputs(grid, drive, cfg.inputs, envs.size());
    if (cfg.n_modes < 3) throw ValidationError("oracle: need at least 3 modes");

    double lmax = 0.0;
    for (const auto& e : envs) lmax = std::max(lmax, e.lambda);
    OracleResult out;
    out.window = cfg.window > 0.0 ? cfg.window : cfg.window_factor * lmax;
    const std::size_t K = cfg.n_modes;
    out.delta_omega = 2.0 * out.window / double(K - 1);
    out.recurrence_time = 2.0 * std::numbers::pi / out.delta_omega;
    if (out.recurrence_time <= grid.t_max())
        throw ValidationError("oracle: bath recurrence time " + std::to_string(out.recurrence_time) +
                              " is shorter than the horizon; increase n_modes");
    out.omega.resize(K);
    for (std::size_t m = 0; m < K; ++m) out.omega[m] = -out.window + out.delta_omega * double(m);

    const std::size_t M = envs.size();
    const double sq = std::sqrt(out.delta_omega);
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    std::vector<std::vector<cplx>> c(M, std::vector<cplx>(K));
    for (std::size_t j = 0; j < M; ++j)
        for (std::size_t m = 0; m < K; ++m) c[j][m] = sq * coupling_v(envs[j], out.omega[m]);

    const std::size_t n = grid.n_samples;
    const double h = grid.dt;
    const double g = p.coupling();

    // Initial mode amplitudes from the incoming field, a_m(0) = -√Δω (2π)^{-1/2} ∫α_in(τ)e^{iω_mτ}dτ.
    std::vector<std::vector<cplx>> a(M, std::vector<cplx>(K));
    for (std::size_t j = 0; j < cfg.inputs.size(); ++j) {
        const auto& in = cfg.inputs[j];
        for (std::size_t m = 0; m < K; ++m) {
            const cplx step = std::exp(I * out.omega[m] * h);
            cplx ph = 1.0, acc{};
            for (std::size_t i = 0; i < n; ++i) {
                if (i % 256 == 0) ph = std::exp(I * out.omega[m] * grid.t(i));
                const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
                acc += w * in[i] * ph;
                ph *= step;
            }
            a[j][m] = -sq * inv_sqrt_2pi * h * acc;
        }
    }
    out.supplied = cfg.init.norm();
    for (const auto& aj : a)
        for (const auto& v : aj) out.supplied += std::norm(v);

    SimulationResult& res = out.sim;
    res.kind = BathKind::NonMarkovian;
    res.initial_norm = cfg.init.norm();
    res.traj = {ComplexSignal(grid), ComplexSignal(grid), ComplexSignal(grid)};
    res.fields.alpha_in.assign(M, ComplexSignal(grid));
    res.fields.alpha_out.assign(M, ComplexSignal(grid));
    res.in_flight.assign(M, 0.0);
    out.bath_population = RealSignal(grid);
    out.alpha_out_instant.assign(M, ComplexSignal(grid));

    // Reconstructed incoming field, α_in(t) = -(2π)^{-1/2}√Δω Σ a_m(0) e^{-iω_m t}.
    for (std::size_t j = 0; j < cfg.inputs.size(); ++j)
        for (std::size_t m = 0; m < K; ++m) {
            const cplx step = std::exp(-I * out.omega[m] * h);
            cplx ph = 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (i % 256 == 0) ph = std::exp(-I * out.omega[m] * grid.t(i));
                res.fields.alpha_in[j][i] -= inv_sqrt_2pi * sq * a[j][m] * ph;
                ph *= step;
            }
        }

    cplx bb = cfg.init.beta_b, bc = cfg.init.beta_c, ba = cfg.init.beta_a;
    std::vector<std::vector<cplx>> ka(M, std::vector<cplx>(K)), acc(M, std::vector<cplx>(K)), tmp(M, std::vector<cplx>(K));

    // Derivative of the full state at (t, Ω); mode part written to dA.
    auto rhs = [&](double t, cplx om, cplx sb, cplx sc, cplx sa, const std::vector<std::vector<cplx>>& A,
                   std::vector<std::vector<cplx>>& dA, cplx& db, cplx& dc, cplx& da) {
        cplx back{};
        for (std::size_t j = 0; j < M; ++j)
            for (std::size_t m = 0; m < K; ++m) {
                back += std::conj(c[j][m]) * A[j][m];
                dA[j][m] = -I * out.omega[m] * A[j][m] + c[j][m] * sb;
            }
        db = -I * g * std::exp(-I * p.delta2 * t) * sa - back;
        dc = -I * std::conj(om) * std::exp(-I * p.delta1 * t) * sa;
        da = -I * g * std::exp(I * p.delta2 * t) * sb - p.gamma_prime * sa - I * om * std::exp(I * p.delta1 * t) * sc;
    };

    auto record = [&](std::size_t i) {
        res.traj.beta_b[i] = bb;
        res.traj.beta_c[i] = bc;
        res.traj.beta_a[i] = ba;
        double pop = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            cplx s{};
            for (std::size_t m = 0; m < K; ++m) {
                s += a[j][m];
                pop += std::norm(a[j][m]);
            }
            out.alpha_out_instant[j][i] = inv_sqrt_2pi * sq * s;
        }
        out.bath_population[i] = pop;
    };
    record(0);

    // One RK4 step of length hs from t; the drive is sampled at the step start, middle and end.
    auto step = [&](double t, double hs, cplx om0, cplx omh, cplx om1) {
        cplx db1, dc1, da1, db2, dc2, da2, db3, dc3, da3, db4, dc4, da4;
        rhs(t, om0, bb, bc, ba, a, ka, db1, dc1, da1);
        for (std::size_t j = 0; j < M; ++j)
            for (std::size_t m = 0; m < K; ++m) {
                acc[j][m] = ka[j][m];
                tmp[j][m] = a[j][m] + 0.5 * hs * ka[j][m];
            }
        rhs(t + 0.5 * hs, omh, bb + 0.5 * hs * db1, bc + 0.5 * hs * dc1, ba + 0.5 * hs * da1, tmp, ka, db2, dc2, da2);
        for (std::size_t j = 0; j < M; ++j)
            for (std::size_t m = 0; m < K; ++m) {
                acc[j][m] += 2.0 * ka[j][m];
                tmp[j][m] = a[j][m] + 0.5 * hs * ka[j][m];
            }
        rhs(t + 0.5 * hs, omh, bb + 0.5 * hs * db2, bc + 0.5 * hs * dc2, ba + 0.5 * hs * da2, tmp, ka, db3, dc3, da3);
        for (std::size_t j = 0; j < M; ++j)
            for (std::size_t m = 0; m < K; ++m) {
                acc[j][m] += 2.0 * ka[j][m];
                tmp[j][m] = a[j][m] + hs * ka[j][m];
            }
        rhs(t + hs, om1, bb + hs * db3, bc + hs * dc3, ba + hs * da3, tmp, ka, db4, dc4, da4);
        for (std::size_t j = 0; j < M; ++j)
            for (std::size_t m = 0; m < K; ++m) a[j][m] += hs / 6.0 * (acc[j][m] + ka[j][m]);
        bb += hs / 6.0 * (db1 + 2.0 * db2 + 2.0 * db3 + db4);
        bc += hs / 6.0 * (dc1 + 2.0 * dc2 + 2.0 * dc3 + dc4);
        ba += hs / 6.0 * (da1 + 2.0 * da2 + 2.0 * da3 + da4);
    };

    using detail::quad3;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double t = grid.t(i);
        const cplx om0 = drive[i], om1 = drive[i + 1], omh = midpoint_value(drive, i);
        const std::size_t nsub = detail::substeps(om0, omh, om1, h, g);
        for (std::size_t sub = 0; sub < nsub; ++sub) {
            const double s0 = double(sub) / double(nsub), sh = (sub + 0.5) / double(nsub), s1 = (sub + 1.0) / double(nsub);
            step(t + s0 * h, h / double(nsub), quad3(om0, omh, om1, s0), quad3(om0, omh, om1, sh), quad3(om0, omh, om1, s1));
        }
        if (!detail::finite(bb) || !detail::finite(bc) || !detail::finite(ba))
            throw SolverError("oracle: amplitude diverged", i + 1, grid.t(i + 1));
        record(i + 1);
    }

    RealSignal ba2 = abs2(res.traj.beta_a);
    out.loss = cumulative_integral4(ba2);
    out.loss *= 2.0 * p.gamma_prime;
    out.total = res.traj.internal_norm() + out.bath_population + out.loss;
    for (std::size_t j = 0; j < M; ++j)
        for (std::size_t m = 0; m < K; ++m) {
            const cplx step = std::exp(-I * out.omega[m] * h);
            cplx ph = 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (i % 256 == 0) ph = std::exp(I * out.omega[m] * (grid.t_max() - grid.t(i)));
                res.fields.alpha_out[j][i] += inv_sqrt_2pi * sq * a[j][m] * ph;
                ph *= step;
            }
        }
    out.final_modes = a;
    return out;
}

}  // namespace nmphoton
