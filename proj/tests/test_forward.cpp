// test_forward.cpp — forward solvers against independent ODE references and the norm audit

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nmphoton/forward.hpp"

using namespace nmphoton;

namespace {

constexpr double pi = std::numbers::pi;

SystemParams driven_params() { return {30 * pi, 40, 6 * pi, 0.3, 0.7}; }

ComplexSignal constant(const TimeGrid& g, cplx v) { return ComplexSignal::from_function(g, [&](double) { return v; }); }

}  // namespace

// Bare cavity (g=0) with memory: β̇ = -z, ż = -λz + ½λγβ. Reference: scipy expm of the 2×2 generator.
TEST(Forward, BareCavityWithMemory) {
    const auto g = TimeGrid::covering(2.0, 1e-3);
    SystemParams p{0.0, 1, 0.0, 0.0, 0.0};
    const auto r = simulate_nonmarkovian(p, {{10.0, 2.31}}, ComplexSignal(g), {}, g, {InitialState{1.0, 0.0, 0.0}});
    EXPECT_NEAR(r.traj.beta_b[100].real(), 0.9469567602198128, 1e-10);
    EXPECT_NEAR(r.traj.beta_b[500].real(), 0.1874205723820408, 1e-10);
    EXPECT_NEAR(r.traj.beta_b[1000].real(), -0.32080608453689297, 1e-10);
    EXPECT_NEAR(r.traj.beta_b[2000].real(), 0.10258169452479493, 1e-10);
    // α_out = k⋆β_b, reference by adaptive quadrature
    EXPECT_NEAR(r.fields.alpha_out[0][500].real(), 1.2823448858863133, 1e-8);
    EXPECT_NEAR(r.fields.alpha_out[0][1000].real(), -0.03933197175414809, 1e-8);
}

TEST(Forward, BareCavityMemoryless) {
    const auto g = TimeGrid::covering(1.0, 1e-3);
    SystemParams p{0.0, 1, 0.0, 0.0, 0.0};
    const auto r = simulate_markovian(p, {10.0}, ComplexSignal(g), {}, g, InitialState{1.0, 0.0, 0.0});
    for (std::size_t i : {250u, 1000u}) {
        EXPECT_NEAR(std::abs(r.traj.beta_b[i] - std::exp(-5.0 * g.t(i))), 0.0, 1e-11);
        EXPECT_NEAR(std::abs(r.fields.alpha_out[0][i] - std::sqrt(10.0) * std::exp(-5.0 * g.t(i))), 0.0, 1e-11);
    }
}

// Constant drive, δ₁=0.3, δ₂=0.7; reference: DOP853 at rtol 1e-13 on the same equations.
TEST(Forward, DrivenWithMemoryMatchesReference) {
    const auto g = TimeGrid::covering(1.0, 1e-4);
    const auto r = simulate_nonmarkovian(driven_params(), {{10.0, 2.31}}, constant(g, 50.0), {}, g);
    const std::size_t k = g.n_samples - 1;
    EXPECT_LT(std::abs(r.traj.beta_b[k] - cplx(-0.07511297572641054, 0.03168262238678179)), 1e-8);
    EXPECT_LT(std::abs(r.traj.beta_c[k] - cplx(0.9721203869539304, 0.0008359269717547233)), 1e-8);
    EXPECT_LT(std::abs(r.traj.beta_a[k] - cplx(0.00020646453341321478, -0.0005799326682199413)), 1e-8);
    EXPECT_LT(std::abs(r.traj.beta_b[5000] - cplx(-0.08167349389352678, 0.016454225930698292)), 3e-8);
}

TEST(Forward, DrivenMemorylessMatchesReference) {
    const auto g = TimeGrid::covering(1.0, 1e-4);
    const auto r = simulate_markovian(driven_params(), {10.0}, constant(g, 50.0), {}, g);
    const std::size_t k = g.n_samples - 1;
    EXPECT_LT(std::abs(r.traj.beta_b[k] - cplx(-0.07415566220492392, 0.03110718969863358)), 1e-8);
    EXPECT_LT(std::abs(r.traj.beta_c[k] - cplx(0.9589298541749479, 0.0026784786489264245)), 1e-8);
    EXPECT_LT(std::abs(r.traj.beta_a[k] - cplx(0.00014877826315232287, -0.000655835671782686)), 1e-8);
}

TEST(Forward, HistoryQuadratureAgreesWithAuxiliaryModes) {
    const auto g = TimeGrid::covering(0.5, 1e-3);
    const SystemParams p{30 * pi, 40, 6 * pi, 0.0, 0.0};
    const std::vector<EnvironmentSpec> envs{{10.0, 2.31}, {5.0, 7.0}};
    const auto a = simulate_nonmarkovian(p, envs, constant(g, 40.0), {}, g);
    const auto b = simulate_nonmarkovian(p, envs, constant(g, 40.0), {}, g, {InitialState{}, true});
    EXPECT_LT(sup_distance(a.traj.beta_b, b.traj.beta_b), 1e-5);
    EXPECT_LT(sup_distance(a.traj.beta_c, b.traj.beta_c), 1e-5);
}

TEST(Forward, LargeMemoryWidthApproachesMemoryless) {
    const auto g = TimeGrid::covering(1.0, 1e-4);
    const SystemParams p{30 * pi, 40, 6 * pi, 0.0, 0.0};
    const auto nm = simulate_nonmarkovian(p, {{10.0, 3000.0}}, constant(g, 60.0), {}, g);
    const auto mk = simulate_markovian(p, {10.0}, constant(g, 60.0), {}, g);
    EXPECT_LT(sup_distance(nm.traj.beta_c, mk.traj.beta_c), 2e-3);
}

TEST(Forward, NormBudgetClosesWithLoss) {
    const auto g = TimeGrid::covering(8.0, 1e-3);
    const SystemParams p{30 * pi, 40, 6 * pi, 0.0, 0.0};
    const auto r = simulate_nonmarkovian(p, {{10.0, 2.31}}, constant(g, 150.0), {}, g);
    const auto a = norm_audit(r, p.gamma_prime);
    EXPECT_GT(a.loss, 1e-3);
    EXPECT_LT(std::abs(a.residual + a.in_flight), 1e-4);
    EXPECT_FALSE(a.flagged);
    const auto m = simulate_markovian(p, {10.0}, constant(g, 150.0), {}, g);
    EXPECT_LT(std::abs(norm_audit(m, p.gamma_prime).residual), 1e-4);
}

TEST(Forward, VacuumWithInputFieldConservesNorm) {
    const auto g = TimeGrid::covering(10.0, 1e-3);
    const SystemParams p{30 * pi, 40, 6 * pi, 0.0, 0.0};
    // Gaussian pulse centred at 3 µs, normalized below.
    const auto in = ComplexSignal::from_function(g, [](double t) { return cplx(std::exp(-(t - 3.0) * (t - 3.0))); });
    auto unit = in;
    unit *= cplx(1.0 / std::sqrt(quadrature(abs2(in))));
    const auto r = simulate_nonmarkovian(p, {{10.0, 2.31}}, constant(g, 20.0), {unit}, g, {InitialState::vacuum()});
    const auto a = norm_audit(r, p.gamma_prime);
    EXPECT_NEAR(a.supplied, 1.0, 1e-6);
    EXPECT_LT(std::abs(a.residual + a.in_flight), 1e-3);
}

TEST(Forward, DriveSpikeIsSubstepped) {
    EXPECT_EQ(detail::substeps(1.0, 1.0, 1.0, 1e-3), 1u);
    EXPECT_EQ(detail::substeps(1000.0, 2000.0, 10.0, 1e-3), 20u);
    EXPECT_EQ(detail::quad3(1.0, 2.0, 5.0, 0.0), cplx(1.0));
    EXPECT_EQ(detail::quad3(1.0, 2.0, 5.0, 0.5), cplx(2.0));
    EXPECT_EQ(detail::quad3(1.0, 2.0, 5.0, 1.0), cplx(5.0));
    // |Ω|dt = 5 would be outside the RK4 stability range without substeps; the c ↔ a exchange stays unitary.
    const auto g = TimeGrid::covering(0.2, 1e-3);
    const SystemParams p{0.0, 1, 0.0, 0.0, 0.0};
    const auto r = simulate_markovian(p, {10.0}, constant(g, 5000.0), {}, g);
    EXPECT_NEAR(std::norm(r.traj.beta_c.samples.back()) + std::norm(r.traj.beta_a.samples.back()), 1.0, 1e-3);
}

TEST(Forward, InvalidInputsRejected) {
    const auto g = TimeGrid::covering(1.0, 1e-3);
    const SystemParams p{30 * pi, 40, 6 * pi, 0.0, 0.0};
    EXPECT_THROW(simulate_nonmarkovian(p, {}, ComplexSignal(g), {}, g), ValidationError);
    EXPECT_THROW(simulate_nonmarkovian(p, {{10.0, 2.31}}, ComplexSignal(TimeGrid(1e-3, 10)), {}, g), ValidationError);
    auto bad = ComplexSignal(g);
    bad[3] = cplx(std::nan(""), 0.0);
    EXPECT_THROW(simulate_markovian(p, {10.0}, bad, {}, g), ValidationError);
    EXPECT_THROW(simulate_markovian(p, {-1.0}, ComplexSignal(g), {}, g), ValidationError);
}
