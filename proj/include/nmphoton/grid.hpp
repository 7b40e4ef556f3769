// grid.hpp — uniform time grids, sampled signals, quadrature and the exponential-kernel convolution

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "nmphoton/errors.hpp"

namespace nmphoton {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

struct TimeGrid {
    double dt{1e-3};
    std::size_t n_samples{6001};

    TimeGrid() = default;
    TimeGrid(double dt_, std::size_t n) : dt(dt_), n_samples(n) { validate(); }

    // Grid of step dt whose last sample is the first one at or beyond t_max.
    static TimeGrid covering(double t_max, double dt) {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("grid: dt must be positive");
        if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("grid: t_max must be positive");
        const double steps = std::ceil(t_max / dt - 1e-9);
        return TimeGrid(dt, static_cast<std::size_t>(steps) + 1);
    }

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("grid: dt must be positive");
        if (n_samples < 2) throw ValidationError("grid: need at least 2 samples");
    }

    double t(std::size_t i) const { return dt * static_cast<double>(i); }
    double t_max() const { return t(n_samples - 1); }
    std::size_t size() const { return n_samples; }

    bool operator==(const TimeGrid& o) const { return dt == o.dt && n_samples == o.n_samples; }
};

template <class T>
struct Signal {
    TimeGrid grid;
    std::vector<T> samples;

    Signal() = default;
    explicit Signal(const TimeGrid& g) : grid(g), samples(g.n_samples, T{}) {}
    Signal(const TimeGrid& g, std::vector<T> s) : grid(g), samples(std::move(s)) {
        if (samples.size() != grid.n_samples)
            throw ValidationError("signal: sample count " + std::to_string(samples.size()) +
                                  " does not match grid (" + std::to_string(grid.n_samples) + ")");
    }

    template <class F>
    static Signal from_function(const TimeGrid& g, F&& f) {
        Signal s(g);
        for (std::size_t i = 0; i < g.n_samples; ++i) s.samples[i] = static_cast<T>(f(g.t(i)));
        return s;
    }

    std::size_t size() const { return samples.size(); }
    T& operator[](std::size_t i) { return samples[i]; }
    const T& operator[](std::size_t i) const { return samples[i]; }

    bool all_finite() const {
        return std::all_of(samples.begin(), samples.end(), [](const T& v) {
            if constexpr (std::is_same_v<T, cplx>) return std::isfinite(v.real()) && std::isfinite(v.imag());
            else return std::isfinite(v);
        });
    }

    Signal& operator+=(const Signal& o) {
        require_same_grid(o);
        for (std::size_t i = 0; i < size(); ++i) samples[i] += o.samples[i];
        return *this;
    }
    Signal& operator-=(const Signal& o) {
        require_same_grid(o);
        for (std::size_t i = 0; i < size(); ++i) samples[i] -= o.samples[i];
        return *this;
    }
    Signal& operator*=(T c) {
        for (auto& v : samples) v *= c;
        return *this;
    }

    void require_same_grid(const Signal& o) const {
        if (!(grid == o.grid)) throw ValidationError("signal: grids differ");
    }
};

using ComplexSignal = Signal<cplx>;
using RealSignal = Signal<double>;

template <class T>
Signal<T> operator+(Signal<T> a, const Signal<T>& b) { return a += b; }
template <class T>
Signal<T> operator-(Signal<T> a, const Signal<T>& b) { return a -= b; }
template <class T>
Signal<T> operator*(T c, Signal<T> a) { return a *= c; }

inline ComplexSignal to_complex(const RealSignal& r) {
    ComplexSignal c(r.grid);
    for (std::size_t i = 0; i < r.size(); ++i) c[i] = r[i];
    return c;
}

inline RealSignal abs2(const ComplexSignal& s) {
    RealSignal r(s.grid);
    for (std::size_t i = 0; i < s.size(); ++i) r[i] = std::norm(s[i]);
    return r;
}

inline RealSignal real_part(const ComplexSignal& s) {
    RealSignal r(s.grid);
    for (std::size_t i = 0; i < s.size(); ++i) r[i] = s[i].real();
    return r;
}

template <class T>
double sup_norm(const Signal<T>& s) {
    double m = 0.0;
    for (const auto& v : s.samples) m = std::max(m, std::abs(v));
    return m;
}

template <class T>
double sup_distance(const Signal<T>& a, const Signal<T>& b) {
    a.require_same_grid(b);
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// ||a-b||_2 / ||b||_2 with trapezoid weights (uniform grid, so plain sums up to end corrections).
template <class T>
double relative_l2_error(const Signal<T>& a, const Signal<T>& b) {
    a.require_same_grid(b);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double w = (i == 0 || i + 1 == a.size()) ? 0.5 : 1.0;
        num += w * std::norm(a[i] - b[i]);
        den += w * std::norm(b[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

// ---------------------------------------------------------------------------
// Quadrature

template <class T>
T quadrature(const Signal<T>& s) {
    const auto n = s.size();
    if (n < 2) return T{};
    T acc{};
    for (std::size_t i = 1; i + 1 < n; ++i) acc += s[i];
    acc += 0.5 * (s[0] + s[n - 1]);
    return acc * s.grid.dt;
}

template <class T>
Signal<T> cumulative_trapezoid(const Signal<T>& s) {
    Signal<T> out(s.grid);
    const double h = s.grid.dt;
    for (std::size_t i = 1; i < s.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (s[i - 1] + s[i]);
    return out;
}

namespace detail {

// m_k(h) = ∫_0^1 e^{-h(1-x)} x^k dx for k = 0..3.
inline std::array<double, 4> exp_moments(double h) {
    std::array<double, 4> m{};
    if (h < 0.5) {
        // series Σ_j (-h)^j k!/(j+k+1)!
        for (int k = 0; k < 4; ++k) {
            double kf = 1.0;
            for (int q = 2; q <= k; ++q) kf *= q;
            double term = kf;  // j = 0 numerator
            double fact = 1.0;
            for (int q = 2; q <= k + 1; ++q) fact *= q;
            double sum = 0.0, hp = 1.0;
            for (int j = 0; j < 40; ++j) {
                sum += hp * term / fact;
                hp *= -h;
                fact *= (j + k + 2);
            }
            m[k] = sum;
        }
        return m;
    }
    m[0] = -std::expm1(-h) / h;
    for (int k = 1; k < 4; ++k) m[k] = 1.0 / h - (k / h) * m[k - 1];
    return m;
}

// Coefficients of the Lagrange basis polynomials (in powers of x) on 4 nodes.
inline std::array<std::array<double, 4>, 4> lagrange_coeffs(const std::array<double, 4>& nodes) {
    std::array<std::array<double, 4>, 4> c{};
    for (int i = 0; i < 4; ++i) {
        std::array<double, 4> poly{1.0, 0.0, 0.0, 0.0};
        double denom = 1.0;
        for (int j = 0; j < 4; ++j) {
            if (j == i) continue;
            std::array<double, 4> next{};
            for (int k = 0; k < 3; ++k) {
                next[k + 1] += poly[k];
                next[k] -= nodes[j] * poly[k];
            }
            poly = next;
            denom *= nodes[i] - nodes[j];
        }
        for (int k = 0; k < 4; ++k) c[i][k] = poly[k] / denom;
    }
    return c;
}

// Weights w_i with ∫_0^1 e^{-h(1-x)} p(x) dx = Σ w_i p(nodes_i) for cubic p.
inline std::array<double, 4> cubic_step_weights(const std::array<double, 4>& nodes, double h) {
    const auto m = exp_moments(h);
    const auto c = lagrange_coeffs(nodes);
    std::array<double, 4> w{};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) w[i] += c[i][k] * m[k];
    return w;
}

struct CubicStencil {
    std::array<double, 4> first, interior, last;
};

// Stencils for the interval [t_n, t_{n+1}]: interior uses n-1..n+2, first n..n+3, last n-2..n+1.
inline CubicStencil cubic_stencil(double h) {
    return {cubic_step_weights({0, 1, 2, 3}, h), cubic_step_weights({-1, 0, 1, 2}, h),
            cubic_step_weights({-2, -1, 0, 1}, h)};
}

template <class T>
T apply_stencil(const Signal<T>& s, std::size_t n, const CubicStencil& st) {
    const auto N = s.size();
    if (n == 0) return st.first[0] * s[0] + st.first[1] * s[1] + st.first[2] * s[2] + st.first[3] * s[3];
    if (n + 2 >= N)
        return st.last[0] * s[n - 2] + st.last[1] * s[n - 1] + st.last[2] * s[n] + st.last[3] * s[n + 1];
    return st.interior[0] * s[n - 1] + st.interior[1] * s[n] + st.interior[2] * s[n + 1] +
           st.interior[3] * s[n + 2];
}

}  // namespace detail

// Fourth-order running integral ∫_0^t s (cubic interpolation on each step).
template <class T>
Signal<T> cumulative_integral4(const Signal<T>& s) {
    if (s.size() < 4) return cumulative_trapezoid(s);
    const auto st = detail::cubic_stencil(0.0);
    Signal<T> out(s.grid);
    for (std::size_t n = 0; n + 1 < s.size(); ++n) out[n + 1] = out[n] + s.grid.dt * detail::apply_stencil(s, n, st);
    return out;
}

// ---------------------------------------------------------------------------
// Differentiation

enum class DiffOrder { Second, Fourth };

template <class T>
Signal<T> differentiate(const Signal<T>& s, DiffOrder order = DiffOrder::Second) {
    const auto n = s.size();
    const double h = s.grid.dt;
    Signal<T> d(s.grid);
    if (order == DiffOrder::Fourth && n >= 5) {
        const double c = 1.0 / (12.0 * h);
        d[0] = c * (-25.0 * s[0] + 48.0 * s[1] - 36.0 * s[2] + 16.0 * s[3] - 3.0 * s[4]);
        d[1] = c * (-3.0 * s[0] - 10.0 * s[1] + 18.0 * s[2] - 6.0 * s[3] + s[4]);
        for (std::size_t i = 2; i + 2 < n; ++i) d[i] = c * (s[i - 2] - 8.0 * s[i - 1] + 8.0 * s[i + 1] - s[i + 2]);
        d[n - 2] = c * (3.0 * s[n - 1] + 10.0 * s[n - 2] - 18.0 * s[n - 3] + 6.0 * s[n - 4] - s[n - 5]);
        d[n - 1] = c * (25.0 * s[n - 1] - 48.0 * s[n - 2] + 36.0 * s[n - 3] - 16.0 * s[n - 4] + 3.0 * s[n - 5]);
        return d;
    }
    if (n < 3) throw ValidationError("differentiate: need at least 3 samples");
    d[0] = (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (s[i + 1] - s[i - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * s[n - 1] - 4.0 * s[n - 2] + s[n - 3]) / (2.0 * h);
    return d;
}

// ---------------------------------------------------------------------------
// z(t) = scale ∫_0^t e^{-λ(t-τ)} s(τ) dτ via the exact exponential recurrence.

enum class Interp { Linear, Cubic };

inline ComplexSignal convolve_exponential(const ComplexSignal& s, double lambda, cplx scale,
                                          Interp interp = Interp::Linear) {
    if (!(lambda > 0.0)) throw ValidationError("convolve_exponential: lambda must be positive");
    const double dt = s.grid.dt;
    const double h = lambda * dt;
    const double decay = std::exp(-h);
    ComplexSignal z(s.grid);
    if (interp == Interp::Cubic && s.size() >= 4) {
        const auto st = detail::cubic_stencil(h);
        for (std::size_t n = 0; n + 1 < s.size(); ++n)
            z[n + 1] = decay * z[n] + scale * dt * detail::apply_stencil(s, n, st);
        return z;
    }
    const auto m = detail::exp_moments(h);
    const double w1 = dt * m[1];
    const double w0 = dt * (m[0] - m[1]);
    for (std::size_t n = 0; n + 1 < s.size(); ++n) z[n + 1] = decay * z[n] + scale * (w0 * s[n] + w1 * s[n + 1]);
    return z;
}

// Values at t_n + dt/2 by cubic interpolation (RK4 midpoints for sampled drives).
inline cplx midpoint_value(const ComplexSignal& s, std::size_t n) {
    static constexpr std::array<double, 4> first{5.0 / 16, 15.0 / 16, -5.0 / 16, 1.0 / 16};
    static constexpr std::array<double, 4> inner{-1.0 / 16, 9.0 / 16, 9.0 / 16, -1.0 / 16};
    static constexpr std::array<double, 4> last{1.0 / 16, -5.0 / 16, 15.0 / 16, 5.0 / 16};
    const auto N = s.size();
    if (N < 4) return 0.5 * (s[n] + s[n + 1]);
    if (n == 0) return first[0] * s[0] + first[1] * s[1] + first[2] * s[2] + first[3] * s[3];
    if (n + 2 >= N) return last[0] * s[n - 2] + last[1] * s[n - 1] + last[2] * s[n] + last[3] * s[n + 1];
    return inner[0] * s[n - 1] + inner[1] * s[n] + inner[2] * s[n + 1] + inner[3] * s[n + 2];
}

}  // namespace nmphoton
