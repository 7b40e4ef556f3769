// multi_env.hpp — several output channels sharing one cavity: sibling shapes, weights, width constraints

#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "nmphoton/errors.hpp"
#include "nmphoton/expsum.hpp"
#include "nmphoton/grid.hpp"
#include "nmphoton/kernels.hpp"
#include "nmphoton/wavepackets.hpp"

namespace nmphoton {

struct MultiEnvPlan {
    std::vector<EnvironmentSpec> envs;  // envs[0] is the reference channel
    std::vector<double> nu, mu;

    void validate() const {
        const auto M = nu.size();
        if (M == 0 || mu.size() != M) throw ValidationError("plan: nu and mu must be non-empty and equally long");
        if (!envs.empty() && envs.size() != M) throw ValidationError("plan: need one environment per weight");
        double sn = 0.0, sm = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            if (!(nu[j] > 0.0) || !(mu[j] > 0.0)) throw ValidationError("plan: weights must be positive");
            sn += nu[j];
            sm += mu[j];
        }
        if (std::abs(sn - 1.0) > 1e-12) throw ValidationError("plan: nu weights must sum to 1");
        if (std::abs(sm - 1.0) > 1e-12) throw ValidationError("plan: mu weights must sum to 1");
        for (const auto& e : envs) e.validate();
    }
};

// max_{j,t} |β_b^{(j)} - β_b^{(1)}| with β_b^{(j)} = (α̇_j + λ_jα_j)/(λ_j√γ_j).
inline double beta_b_chain_check(const std::vector<ComplexSignal>& targets, const std::vector<EnvironmentSpec>& envs) {
    if (targets.size() < 2 || targets.size() != envs.size())
        throw ValidationError("chain check: need M >= 2 targets, one per environment");
    auto beta = [&](std::size_t j) {
        const auto d = differentiate(targets[j], DiffOrder::Fourth);
        ComplexSignal b(targets[j].grid);
        const double s = 1.0 / (envs[j].lambda * std::sqrt(envs[j].gamma));
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = s * (d[i] + envs[j].lambda * targets[j][i]);
        return b;
    };
    const auto b1 = beta(0);
    double m = 0.0;
    for (std::size_t j = 1; j < targets.size(); ++j) m = std::max(m, sup_distance(beta(j), b1));
    return m;
}

// α_j = (λ_j√γ_j)/(λ₁√γ₁) ∫_0^t [α̇₁ + λ₁α₁] e^{-λ_j(t-t₁)} dt₁, sampled route.
inline ComplexSignal sibling_wavepacket(const ComplexSignal& alpha1, const EnvironmentSpec& env1,
                                       const EnvironmentSpec& envj) {
    env1.validate();
    envj.validate();
    if (env1.lambda == envj.lambda) {
        auto out = alpha1;
        out *= cplx(std::sqrt(envj.gamma / env1.gamma));
        return out;
    }
    const auto d = differentiate(alpha1, DiffOrder::Fourth);
    ComplexSignal src(alpha1.grid);
    for (std::size_t i = 0; i < src.size(); ++i) src[i] = d[i] + env1.lambda * alpha1[i];
    const double scale = envj.lambda * std::sqrt(envj.gamma) / (env1.lambda * std::sqrt(env1.gamma));
    return convolve_exponential(src, envj.lambda, scale, Interp::Cubic);
}

// Same relation on an exponential sum: exact.
inline ExpSum sibling_wavepacket(const ExpSum& alpha1, const EnvironmentSpec& env1, const EnvironmentSpec& envj) {
    env1.validate();
    envj.validate();
    const double ratio = std::sqrt(envj.gamma / env1.gamma);
    if (env1.lambda == envj.lambda) return cplx(ratio) * alpha1;
    const ExpSum src = alpha1.derivative() + cplx(env1.lambda) * alpha1;
    return cplx(envj.lambda * ratio / env1.lambda) * src.convolve_exponential(envj.lambda);
}

// Closed form for α₁ = E₁e^{-Γt}sin³Bt:
// α_j = D_j e^{-λ_jt}(24B³(λ₁-λ_j)/C_j + 3h₁ - h₃), evaluated with e^{-λ_jt}·e^{(λ_j-Γ)t} folded to e^{-Γt}.
inline ComplexSignal sibling_closed_form_sin3(double B, double G, double nu1, double lambda1,
                                              const EnvironmentSpec& envj, double gamma1, const TimeGrid& grid) {
    envj.validate();
    const double lj = envj.lambda;
    const double E1 = normalization_constants(B, G, nu1).E1;
    const double Dj = E1 * lj * std::sqrt(envj.gamma / gamma1) / (4.0 * lambda1);
    const double Cj = (B * B + (G - lj) * (G - lj)) * (9 * B * B + (G - lj) * (G - lj));
    auto h_scaled = [&](int n, double t) {
        const double nB = n * B;
        return (nB * (lj - lambda1) * std::cos(nB * t) + (nB * nB + (G - lambda1) * (G - lj)) * std::sin(nB * t)) /
               (nB * nB + (G - lj) * (G - lj));
    };
    return ComplexSignal::from_function(grid, [&](double t) {
        const double c = 24.0 * std::pow(B, 3) * (lambda1 - lj) / Cj * std::exp(-lj * t);
        return Dj * (c + std::exp(-G * t) * (3.0 * h_scaled(1, t) - h_scaled(3, t)));
    });
}

// γ_j = μ_jγ₁/μ₁
inline std::vector<double> gamma_from_weights_markovian(double gamma1, const std::vector<double>& mu) {
    if (mu.empty() || !(gamma1 > 0.0)) throw ValidationError("weights: need gamma1 > 0 and a weight list");
    std::vector<double> g(mu.size());
    for (std::size_t j = 0; j < mu.size(); ++j) {
        if (!(mu[j] > 0.0)) throw ValidationError("weights: mu must be positive");
        g[j] = j == 0 ? gamma1 : mu[j] * gamma1 / mu[0];
    }
    return g;
}

namespace detail {

struct WidthTerms {
    double numerator, denominator;  // RHS of the width relation = numerator/denominator
};

inline WidthTerms width_rhs(double lj, double l1, double B, double G) {
    const auto c = normalization_constants(B, G, 1.0, l1);
    const double num = 16.0 * G * (4 * B * B + G * G) * l1 * l1 + c.a1 * lj + 4.0 * G * c.a2 * lj * lj +
                       c.a2 * lj * lj * lj;
    const double den = (B * B + (G + lj) * (G + lj)) * (9 * B * B + (G + lj) * (G + lj));
    return {num, den};
}

}  // namespace detail

// γ_j from the normalization ∫|α_j|² = ν_j for the sin³ family; λ_j taken from plan.envs.
inline std::vector<double> gamma_from_weights_nonmarkovian_sin3(const MultiEnvPlan& plan, double B, double G) {
    plan.validate();
    if (plan.envs.size() != plan.nu.size()) throw ValidationError("weights: every channel needs its lambda");
    const double l1 = plan.envs[0].lambda, g1 = plan.envs[0].gamma;
    std::vector<double> g(plan.nu.size());
    g[0] = g1;
    for (std::size_t j = 1; j < g.size(); ++j) {
        const double lj = plan.envs[j].lambda;
        const auto r = detail::width_rhs(lj, l1, B, G);
        g[j] = 5.0 * plan.nu[j] * g1 * l1 * l1 * r.denominator / (lj * plan.nu[0] * r.numerator);
    }
    return g;
}

// 5ν_jμ₁λ₁²/(μ_jλ_jν₁) - RHS(λ_j)
inline double width_constraint_residual(double lj, double l1, double nuj, double nu1, double muj, double mu1, double B,
                                        double G) {
    const auto r = detail::width_rhs(lj, l1, B, G);
    return 5.0 * nuj * mu1 * l1 * l1 / (muj * lj * nu1) - r.numerator / r.denominator;
}

inline double width_constraint_relative(double lj, double l1, double nuj, double nu1, double muj, double mu1, double B,
                                        double G) {
    const auto r = detail::width_rhs(lj, l1, B, G);
    const double lhs = 5.0 * nuj * mu1 * l1 * l1 / (muj * lj * nu1);
    const double rhs = r.numerator / r.denominator;
    return (lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
}

struct ChannelRoots {
    std::size_t channel{0};  // zero-based
    std::vector<double> roots;
    std::vector<double> residuals;  // relative
    std::size_t brackets{0};
    std::size_t sign_changes{0};
    std::optional<double> chosen;
    std::string status;  // "ok" or "no sign change in search interval"
};

struct WidthSolveReport {
    double lambda1{0.0}, B{0.0}, Gamma{0.0};
    std::vector<double> nu, mu;
    double search_min{1e-3}, search_max{100.0};
    std::vector<ChannelRoots> channels;  // j = 2..M

    bool all_found() const {
        for (const auto& c : channels)
            if (c.roots.empty()) return false;
        return true;
    }
};

struct WidthSearch {
    double lambda_min{1e-3};
    double lambda_max{100.0};
    std::size_t brackets{2000};
    double rel_tol{1e-10};
};

// Every root of the width relation per channel j ≥ 2: log-spaced sign-change scan, then bisection.
inline WidthSolveReport solve_widths(double lambda1, const std::vector<double>& nu, const std::vector<double>& mu,
                                     double B, double G, const WidthSearch& search = {}) {
    MultiEnvPlan plan{{}, nu, mu};
    plan.validate();
    if (!(lambda1 > 0.0) || !(B > 0.0) || !(G > 0.0)) throw ValidationError("widths: lambda1, B, Gamma must be positive");
    if (!(search.lambda_min > 0.0) || !(search.lambda_max > search.lambda_min) || search.brackets < 1)
        throw ValidationError("widths: bad search interval");

    WidthSolveReport rep;
    rep.lambda1 = lambda1;
    rep.B = B;
    rep.Gamma = G;
    rep.nu = nu;
    rep.mu = mu;
    rep.search_min = search.lambda_min;
    rep.search_max = search.lambda_max;
    const double lo = std::log(search.lambda_min), hi = std::log(search.lambda_max);
    for (std::size_t j = 1; j < nu.size(); ++j) {
        auto f = [&](double l) { return width_constraint_residual(l, lambda1, nu[j], nu[0], mu[j], mu[0], B, G); };
        ChannelRoots ch;
        ch.channel = j;
        ch.brackets = search.brackets;
        double xa = search.lambda_min, fa = f(xa);
        for (std::size_t k = 1; k <= search.brackets; ++k) {
            const double xb = std::exp(lo + (hi - lo) * double(k) / double(search.brackets));
            const double fb = f(xb);
            if (fa == 0.0) {
                ch.roots.push_back(xa);
            } else if (fa * fb < 0.0) {
                ++ch.sign_changes;
                double a = xa, b = xb, fl = fa;
                while ((b - a) > search.rel_tol * b) {
                    const double m = 0.5 * (a + b);
                    const double fm = f(m);
                    if (fm == 0.0) {
                        a = b = m;
                        break;
                    }
                    if ((fm < 0.0) == (fl < 0.0)) {
                        a = m;
                        fl = fm;
                    } else {
                        b = m;
                    }
                }
                ch.roots.push_back(0.5 * (a + b));
            }
            xa = xb;
            fa = fb;
        }
        for (double r : ch.roots)
            ch.residuals.push_back(width_constraint_relative(r, lambda1, nu[j], nu[0], mu[j], mu[0], B, G));
        if (ch.roots.size() == 1) ch.chosen = ch.roots[0];
        ch.status = ch.roots.empty() ? "no sign change in search interval" : "ok";
        rep.channels.push_back(std::move(ch));
    }
    return rep;
}

// α_jf = E₁√(μ_j/μ₁) e^{-Γt} sin³Bt
inline std::vector<ComplexSignal> markovian_siblings(double E1, double B, double G, const std::vector<double>& mu,
                                                     const TimeGrid& grid) {
    if (mu.empty()) throw ValidationError("siblings: empty weight list");
    for (double m : mu)
        if (!(m > 0.0)) throw ValidationError("siblings: weights must be positive");
    std::vector<ComplexSignal> out;
    for (double m : mu) {
        const double amp = E1 * std::sqrt(m / mu[0]);
        out.push_back(ComplexSignal::from_function(grid, [&](double t) {
            const double s = std::sin(B * t);
            return amp * std::exp(-G * t) * s * s * s;
        }));
    }
    return out;
}

struct EqualityReport {
    std::size_t j{0}, m{0};
    bool lambda_equal{false}, mu_equal{false}, nu_equal{false};
    bool nonmarkovian_equal{false};  // all three hold: channels j and m carry identical shapes
    bool markovian_equal{false};     // μ_j = μ_m
};

inline EqualityReport equality_conditions(const MultiEnvPlan& plan, std::size_t j, std::size_t m) {
    plan.validate();
    if (j == m) throw ValidationError("equality: channels must differ");
    if (j >= plan.nu.size() || m >= plan.nu.size() || plan.envs.size() != plan.nu.size())
        throw ValidationError("equality: channel index out of range");
    auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); };
    EqualityReport r;
    r.j = j;
    r.m = m;
    r.lambda_equal = same(plan.envs[j].lambda, plan.envs[m].lambda);
    r.mu_equal = same(plan.mu[j], plan.mu[m]);
    r.nu_equal = same(plan.nu[j], plan.nu[m]);
    r.nonmarkovian_equal = r.lambda_equal && r.mu_equal && r.nu_equal;
    r.markovian_equal = r.mu_equal;
    return r;
}

struct SeriesResult {
    std::vector<ComplexSignal> epsilon;  // ε_{j,n}(t), n = 0..n_terms-1
    std::vector<ComplexSignal> partial;  // Σ_{n<=N} ε_{j,n} λ_j^{n+1}
};

// ε_{j,n}(t) = (-1)ⁿ √γ_j/(λ₁ n! √γ₁) ∫_0^t (t-t₁)ⁿ [α̇₁ + λ₁α₁] dt₁, via repeated integration
// (the n-fold running integral equals the (t-t₁)ⁿ/n! kernel).
inline SeriesResult series_expansion(const Waveform& alpha1, const EnvironmentSpec& env1, double gamma_j,
                                     double lambda_j, std::size_t n_terms, const TimeGrid& grid) {
    if (n_terms < 1) throw ValidationError("series: need at least one term");
    env1.validate();
    const auto a0 = alpha1.sample(grid, 0);
    const auto a1 = alpha1.sample(grid, 1);
    ComplexSignal src(grid);
    for (std::size_t i = 0; i < src.size(); ++i) src[i] = a1[i] + env1.lambda * a0[i];
    const double pre = std::sqrt(gamma_j) / (env1.lambda * std::sqrt(env1.gamma));
    SeriesResult r;
    ComplexSignal running = src;
    ComplexSignal sum(grid);
    double lpow = lambda_j;
    for (std::size_t n = 0; n < n_terms; ++n) {
        running = cumulative_integral4(running);
        auto eps = running;
        eps *= cplx((n % 2 == 0 ? 1.0 : -1.0) * pre);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += eps[i] * lpow;
        lpow *= lambda_j;
        r.epsilon.push_back(std::move(eps));
        r.partial.push_back(sum);
    }
    return r;
}

}  // namespace nmphoton
