// test_network.cpp — cascaded nodes: norm budget, output relation, delay handling

#include <gtest/gtest.h>

#include <cmath>

#include "nmphoton/network.hpp"

using namespace nmphoton;

namespace {

ComplexSignal constant(const TimeGrid& g, cplx v) { return ComplexSignal::from_function(g, [&](double) { return v; }); }

NetworkSpec chain(std::size_t P, double tau, const TimeGrid& g, BathKind kind = BathKind::NonMarkovian) {
    NetworkSpec n;
    n.delay_tau = tau;
    n.kind = kind;
    for (std::size_t q = 0; q < P; ++q) {
        NodeSpec s;
        s.channels = q == 0 ? std::vector<EnvironmentSpec>{{10.0, 2.31}} : std::vector<EnvironmentSpec>{{10.0, 2.31}, {2.0, 5.0}};
        s.initial_state = q == 0 ? NodeInit::C : NodeInit::B;
        n.nodes.push_back(s);
        n.drives.push_back(constant(g, q == 0 ? 60.0 : 40.0));
    }
    return n;
}

}  // namespace

TEST(Network, CascadeBudgetCloses) {
    const auto g = TimeGrid::covering(6.0, 1e-3);
    for (std::size_t P : {1u, 2u, 3u})
        for (double tau : {0.0, 0.25}) {
            const auto r = simulate_cascade(chain(P, tau, g), g);
            EXPECT_EQ(r.nodes.size(), P);
            EXPECT_LT(std::abs(r.audit.residual + r.audit.in_flight), 1e-3) << "P=" << P << " tau=" << tau;
            EXPECT_GT(r.audit.loss, 0.0);
        }
    const auto m = simulate_cascade(chain(3, 0.1, g, BathKind::Markovian), g);
    EXPECT_LT(std::abs(m.audit.residual + m.audit.in_flight), 1e-3);
}

TEST(Network, ReceiverSeesDelayedOutput) {
    const auto g = TimeGrid::covering(3.0, 1e-3);
    const auto r = simulate_cascade(chain(2, 0.5, g), g);
    const auto& a = r.nodes[0].alpha_out_1;
    const auto& b = r.nodes[1].alpha_in_1;
    for (std::size_t i = 0; i < 500; ++i) ASSERT_EQ(b[i], cplx(0.0));
    for (std::size_t i = 500; i < g.n_samples; i += 97) EXPECT_EQ(b[i], a[i - 500]);
}

TEST(Network, OutputRelation) {
    // α_out = -α_in + k⋆β_b, with the convolution against a closed form for β_b = e^{-t}:
    // λ√γ ∫_0^t e^{-λ(t-s)} e^{-s} ds = λ√γ (e^{-t} - e^{-λt}) / (λ - 1)
    const auto g = TimeGrid::covering(4.0, 1e-3);
    const EnvironmentSpec env{10.0, 2.31};
    const auto bb = ComplexSignal::from_function(g, [](double t) { return cplx(std::exp(-t)); });
    const auto in = ComplexSignal::from_function(g, [](double t) { return cplx(0.0, std::sin(t)); });
    const auto out = channel_output(in, bb, env);
    const double c = env.lambda * std::sqrt(env.gamma) / (env.lambda - 1.0);
    for (std::size_t i = 0; i < g.n_samples; i += 113) {
        const double t = g.t(i);
        EXPECT_NEAR(std::abs(out[i] - (c * (std::exp(-t) - std::exp(-env.lambda * t)) - in[i])), 0.0, 1e-11);
    }
}

TEST(Network, InvalidSpecsRejected) {
    const auto g = TimeGrid::covering(1.0, 1e-3);
    EXPECT_THROW(delay_samples(0.00025, g), ValidationError);
    EXPECT_EQ(delay_samples(0.25, g), 250u);
    auto n = chain(2, 0.0, g);
    n.nodes[1].channels.pop_back();
    EXPECT_THROW(simulate_cascade(n, g), ValidationError);
    n = chain(2, 0.0, g);
    n.nodes[0].params.n_atoms = 40;
    EXPECT_THROW(simulate_cascade(n, g), ValidationError);
    n = chain(2, 0.0, g);
    n.drives.pop_back();
    EXPECT_THROW(simulate_cascade(n, g), ValidationError);
    n = chain(2, -1.0, g);
    EXPECT_THROW(simulate_cascade(n, g), ValidationError);
}
