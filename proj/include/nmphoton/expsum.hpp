// expsum.hpp — exponential-polynomial sums Σ a_k t^p_k e^{s_k t} with exact calculus

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "nmphoton/errors.hpp"
#include "nmphoton/grid.hpp"

namespace nmphoton {

struct ExpTerm {
    cplx coeff;
    int power{0};
    cplx rate;
};

class ExpSum {
public:
    std::vector<ExpTerm> terms;

    ExpSum() = default;
    explicit ExpSum(std::vector<ExpTerm> t) : terms(std::move(t)) { simplify(); }

    cplx operator()(double t) const {
        cplx acc{};
        for (const auto& k : terms) acc += k.coeff * ipow(t, k.power) * std::exp(k.rate * t);
        return acc;
    }

    ExpSum derivative() const {
        std::vector<ExpTerm> out;
        out.reserve(2 * terms.size());
        for (const auto& k : terms) {
            out.push_back({k.coeff * k.rate, k.power, k.rate});
            if (k.power > 0) out.push_back({k.coeff * double(k.power), k.power - 1, k.rate});
        }
        return ExpSum(std::move(out));
    }

    ExpSum derivative(int order) const {
        ExpSum d = *this;
        for (int i = 0; i < order; ++i) d = d.derivative();
        return d;
    }

    ExpSum& operator+=(const ExpSum& o) {
        terms.insert(terms.end(), o.terms.begin(), o.terms.end());
        simplify();
        return *this;
    }
    ExpSum& operator*=(cplx c) {
        for (auto& k : terms) k.coeff *= c;
        return *this;
    }
    friend ExpSum operator+(ExpSum a, const ExpSum& b) { return a += b; }
    friend ExpSum operator*(cplx c, ExpSum a) { return a *= c; }

    // Multiply by e^{ds·t}.
    ExpSum with_rate_shift(cplx ds) const {
        ExpSum out = *this;
        for (auto& k : out.terms) k.rate += ds;
        return out;
    }

    ExpSum conj() const {
        ExpSum out = *this;
        for (auto& k : out.terms) {
            k.coeff = std::conj(k.coeff);
            k.rate = std::conj(k.rate);
        }
        return out;
    }

    // ∫_0^t e^{-λ(t-τ)} f(τ) dτ, exact.
    ExpSum convolve_exponential(double lambda) const {
        std::vector<ExpTerm> out;
        for (const auto& k : terms) {
            const cplx u = k.rate + lambda;
            const int p = k.power;
            if (std::abs(u) < 1e-10) {
                out.push_back({k.coeff / double(p + 1), p + 1, cplx(-lambda, 0.0)});
                continue;
            }
            // ∫_0^t τ^p e^{uτ} dτ = e^{ut} Σ_q (-1)^q p!/(p-q)! t^{p-q}/u^{q+1} - (-1)^p p!/u^{p+1}
            double falling = 1.0;
            for (int q = 0; q <= p; ++q) {
                if (q > 0) falling *= (p - q + 1);
                const double sign = (q % 2 == 0) ? 1.0 : -1.0;
                out.push_back({k.coeff * sign * falling / std::pow(u, q + 1), p - q, k.rate});
            }
            const double sign_p = (p % 2 == 0) ? 1.0 : -1.0;
            out.push_back({-k.coeff * sign_p * falling / std::pow(u, p + 1), 0, cplx(-lambda, 0.0)});
        }
        return ExpSum(std::move(out));
    }

    // ∫_T^∞ |f|² dt; every pairwise rate sum must have negative real part.
    double tail_norm_squared(double T = 0.0) const {
        cplx acc{};
        for (const auto& a : terms)
            for (const auto& b : terms) {
                const cplx c = a.rate + std::conj(b.rate);
                if (!(c.real() < 0.0)) throw ValidationError("expsum: integral of |f|^2 diverges");
                acc += a.coeff * std::conj(b.coeff) * tail_moment(a.power + b.power, c, T);
            }
        return acc.real();
    }

    ComplexSignal sample(const TimeGrid& g) const {
        return ComplexSignal::from_function(g, [this](double t) { return (*this)(t); });
    }

    bool empty() const { return terms.empty(); }

private:
    static double ipow(double t, int p) {
        double r = 1.0;
        for (int i = 0; i < p; ++i) r *= t;
        return r;
    }

    // ∫_T^∞ t^n e^{ct} dt = e^{cT} Σ_{k=0}^n n!/k! T^k / (-c)^{n-k+1}
    static cplx tail_moment(int n, cplx c, double T) {
        cplx acc{};
        double nf = 1.0;
        for (int i = 2; i <= n; ++i) nf *= i;
        double kf = 1.0;
        for (int k = 0; k <= n; ++k) {
            if (k > 0) kf *= k;
            acc += nf / kf * ipow(T, k) / std::pow(-c, n - k + 1);
        }
        return acc * std::exp(c * T);
    }

    void simplify() {
        std::vector<ExpTerm> merged;
        for (const auto& k : terms) {
            if (k.coeff == cplx{}) continue;
            bool found = false;
            for (auto& m : merged)
                if (m.power == k.power && m.rate == k.rate) {
                    m.coeff += k.coeff;
                    found = true;
                    break;
                }
            if (!found) merged.push_back(k);
        }
        terms = std::move(merged);
    }
};

}  // namespace nmphoton
