// kernels.hpp — Lorentzian bath channels: J(ω), k(t), F(t) and their memoryless limits

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>

#include "nmphoton/errors.hpp"

namespace nmphoton {

struct EnvironmentSpec {
    double gamma{10.0};   // decay rate γ_j (MHz)
    double lambda{2.31};  // spectral width λ_j (MHz)

    void validate() const {
        if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("environment: gamma must be positive");
        if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("environment: lambda must be positive");
    }
};

enum class BathKind { NonMarkovian, Markovian };

struct BathModel {
    BathKind kind{BathKind::NonMarkovian};
    EnvironmentSpec env;
};

inline std::string to_string(BathKind k) { return k == BathKind::Markovian ? "markovian" : "non-markovian"; }

// J(ω) = (γ/2π) λ²/(λ²+ω²), ω measured from the cavity frequency.
inline double spectral_density(const EnvironmentSpec& env, double omega) {
    const double l2 = env.lambda * env.lambda;
    return env.gamma / (2.0 * std::numbers::pi) * l2 / (l2 + omega * omega);
}

// Frequency-domain coupling v(ω) = λ√(γ/2π)/(λ - iω), |v|² = J.
inline std::complex<double> coupling_v(const EnvironmentSpec& env, double omega) {
    return env.lambda * std::sqrt(env.gamma / (2.0 * std::numbers::pi)) /
           std::complex<double>(env.lambda, -omega);
}

// k(t) = λ√γ u(t) e^{-λt} with u(0) = 1.
inline double response_k(const EnvironmentSpec& env, double t) {
    if (t < 0.0) return 0.0;
    return env.lambda * std::sqrt(env.gamma) * std::exp(-env.lambda * t);
}

// F(t) = ½λγ e^{-λ|t|}
inline double memory_F(const EnvironmentSpec& env, double t) {
    return 0.5 * env.lambda * env.gamma * std::exp(-env.lambda * std::abs(t));
}

// Delta-function weights of k and F in the λ→∞ limit: (√γ, γ).
inline std::pair<double, double> markovian_limits(const EnvironmentSpec& env) {
    return {std::sqrt(env.gamma), env.gamma};
}

}  // namespace nmphoton
