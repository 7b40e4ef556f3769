// network.hpp — cascaded driven atom-cavity nodes chained through their channel-1 fields

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nmphoton/errors.hpp"
#include "nmphoton/forward.hpp"
#include "nmphoton/grid.hpp"
#include "nmphoton/kernels.hpp"

namespace nmphoton {

enum class NodeInit { C, B };  // C: atom in |c⟩ holding the excitation; B: atom in |b⟩, empty cavity

struct NodeSpec {
    SystemParams params{30.0 * std::numbers::pi, 1, 6.0 * std::numbers::pi, 0.0, 0.0};
    std::vector<EnvironmentSpec> channels;
    NodeInit initial_state{NodeInit::C};
};

struct NetworkSpec {
    std::vector<NodeSpec> nodes;
    double delay_tau{0.0};
    std::vector<ComplexSignal> drives;
    BathKind kind{BathKind::NonMarkovian};

    void validate(const TimeGrid& grid) const {
        if (nodes.empty()) throw ValidationError("network: need at least one node");
        if (drives.size() != nodes.size()) throw ValidationError("network: need one drive per node");
        if (!(delay_tau >= 0.0) || !std::isfinite(delay_tau)) throw ValidationError("network: delay_tau must be >= 0");
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            const auto& nd = nodes[q];
            nd.params.validate(true);
            if (nd.params.n_atoms != 1) throw ValidationError("network: nodes hold a single atom (n_atoms = 1)");
            const std::size_t want = q == 0 ? 1 : 2;
            if (nd.channels.size() != want)
                throw ValidationError("network: node " + std::to_string(q + 1) + " needs " + std::to_string(want) +
                                      " channel(s)");
            for (const auto& e : nd.channels) e.validate();
            if (!(drives[q].grid == grid)) throw ValidationError("network: drive not on the run grid");
        }
    }
};

struct NodeTrajectory {
    ComplexSignal beta_b, beta_c, beta_a;
    ComplexSignal alpha_in_1, alpha_out_1, alpha_out_2;  // alpha_out_2 empty for the sending node
    bool has_second{false};
    double in_flight{0.0};
    double gamma_prime{0.0};
};

namespace detail {

inline NodeTrajectory to_node(const SimulationResult& r, double gamma_prime) {
    NodeTrajectory n;
    n.beta_b = r.traj.beta_b;
    n.beta_c = r.traj.beta_c;
    n.beta_a = r.traj.beta_a;
    n.alpha_in_1 = r.fields.alpha_in[0];
    n.alpha_out_1 = r.fields.alpha_out[0];
    if (r.fields.alpha_out.size() > 1) {
        n.alpha_out_2 = r.fields.alpha_out[1];
        n.has_second = true;
    }
    for (double f : r.in_flight) n.in_flight += f;
    n.gamma_prime = gamma_prime;
    return n;
}

inline std::vector<double> gammas_of(const NodeSpec& n) {
    std::vector<double> g;
    for (const auto& e : n.channels) g.push_back(e.gamma);
    return g;
}

}  // namespace detail

inline NodeTrajectory simulate_sending_node(const NodeSpec& node, const ComplexSignal& drive, const TimeGrid& grid,
                                            BathKind kind = BathKind::NonMarkovian) {
    if (node.channels.size() != 1) throw ValidationError("network: sending node needs exactly one channel");
    const InitialState init = node.initial_state == NodeInit::C ? InitialState::excited_c() : InitialState::vacuum();
    if (kind == BathKind::Markovian)
        return detail::to_node(simulate_markovian(node.params, detail::gammas_of(node), drive, {}, grid, init),
                               node.params.gamma_prime);
    return detail::to_node(simulate_nonmarkovian(node.params, node.channels, drive, {}, grid, {init, false}),
                           node.params.gamma_prime);
}

// Channel 1 receives alpha_in_1 and reflects (α_out = -α_in + k⋆β_b); channel 2 has no input.
inline NodeTrajectory simulate_receiving_node(const NodeSpec& node, const ComplexSignal& drive,
                                              const ComplexSignal& alpha_in_1, const TimeGrid& grid,
                                              BathKind kind = BathKind::NonMarkovian) {
    if (node.channels.size() != 2) throw ValidationError("network: receiving node needs exactly two channels");
    const InitialState init = node.initial_state == NodeInit::C ? InitialState::excited_c() : InitialState::vacuum();
    const std::vector<ComplexSignal> inputs{alpha_in_1, ComplexSignal(grid)};
    if (kind == BathKind::Markovian)
        return detail::to_node(simulate_markovian(node.params, detail::gammas_of(node), drive, inputs, grid, init),
                               node.params.gamma_prime);
    return detail::to_node(simulate_nonmarkovian(node.params, node.channels, drive, inputs, grid, {init, false}),
                           node.params.gamma_prime);
}

// Output of one channel from its input and the cavity amplitude: α_out = -α_in + k⋆β_b.
inline ComplexSignal channel_output(const ComplexSignal& alpha_in, const ComplexSignal& beta_b,
                                    const EnvironmentSpec& env) {
    return convolve_exponential(beta_b, env.lambda, env.lambda * std::sqrt(env.gamma), Interp::Cubic) - alpha_in;
}

inline std::size_t delay_samples(double tau, const TimeGrid& grid) {
    const double k = tau / grid.dt;
    if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k))
        throw ValidationError("network: delay_tau must be an integer multiple of dt");
    return static_cast<std::size_t>(std::llround(k));
}

inline ComplexSignal shift_signal(const ComplexSignal& s, std::size_t d) {
    ComplexSignal out(s.grid);
    for (std::size_t i = d; i < s.size(); ++i) out[i] = s[i - d];
    return out;
}

struct NetworkAudit {
    double internal{0.0}, emitted{0.0}, loss{0.0};
    double in_flight{0.0};  // still travelling at T, including chained output not yet delivered
    double total{0.0};
    double residual{0.0};  // total - 1
};

// Σ_q node norms + terminal-channel emission + Σ_q 2γ′_q∫|β_aq|², against the single initial excitation.
inline NetworkAudit network_norm_audit(const std::vector<NodeTrajectory>& nodes, const NetworkSpec& net) {
    NetworkAudit a;
    if (nodes.empty()) return a;
    const auto& grid = nodes[0].beta_b.grid;
    const std::size_t d = delay_samples(net.delay_tau, grid);
    const std::size_t n = grid.n_samples;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        const auto& nd = nodes[q];
        a.internal += std::norm(nd.beta_b[n - 1]) + std::norm(nd.beta_c[n - 1]) + std::norm(nd.beta_a[n - 1]);
        a.loss += 2.0 * nd.gamma_prime * integral4(abs2(nd.beta_a));
        if (nd.has_second) a.emitted += integral4(abs2(nd.alpha_out_2));
        const bool last = q + 1 == nodes.size();
        if (last) {
            a.emitted += integral4(abs2(nd.alpha_out_1));
        } else if (d > 0) {
            // The final d samples of a chained output never reach the next node inside the horizon.
            const auto s = abs2(nd.alpha_out_1);
            RealSignal tail(TimeGrid(grid.dt, std::max<std::size_t>(d + 1, 2)));
            for (std::size_t i = 0; i <= d && i < n; ++i) tail[i] = s[n - 1 - d + i];
            a.in_flight += integral4(tail);
        }
        a.in_flight += nd.in_flight;
    }
    a.total = a.internal + a.emitted + a.loss;
    a.residual = a.total - 1.0;
    return a;
}

struct CascadeResult {
    std::vector<NodeTrajectory> nodes;
    NetworkAudit audit;
};

inline CascadeResult simulate_cascade(const NetworkSpec& net, const TimeGrid& grid) {
    net.validate(grid);
    const std::size_t d = delay_samples(net.delay_tau, grid);
    if (net.nodes.size() > 1 && d >= grid.n_samples - 1)
        throw ValidationError("network: grid too short for the chaining delay");
    CascadeResult out;
    out.nodes.push_back(simulate_sending_node(net.nodes[0], net.drives[0], grid, net.kind));
    for (std::size_t q = 1; q < net.nodes.size(); ++q) {
        const auto in = shift_signal(out.nodes.back().alpha_out_1, d);
        out.nodes.push_back(simulate_receiving_node(net.nodes[q], net.drives[q], in, grid, net.kind));
    }
    out.audit = network_norm_audit(out.nodes, net);
    return out;
}

}  // namespace nmphoton
