// test_oracle.cpp — explicit discretized bath against the kernel solver

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nmphoton/oracle.hpp"

using namespace nmphoton;

namespace {

constexpr double pi = std::numbers::pi;

ComplexSignal constant(const TimeGrid& g, cplx v) { return ComplexSignal::from_function(g, [&](double) { return v; }); }

}  // namespace

TEST(Oracle, DiscretizedBathTracksKernelSolver) {
    const auto g = TimeGrid::covering(2.0, 1e-3);
    const SystemParams p{30 * pi, 40, 6 * pi, 0.4, 0.0};
    const std::vector<EnvironmentSpec> envs{{10.0, 2.31}};
    const auto drive = constant(g, 60.0);
    DiscretizedBathConfig cfg;
    cfg.n_modes = 1601;
    const auto o = simulate_discretized_bath(p, envs, drive, cfg, g);
    const auto k = simulate_nonmarkovian(p, envs, drive, {}, g);
    EXPECT_GT(o.recurrence_time, g.t_max());
    EXPECT_LT(sup_distance(o.sim.traj.beta_b, k.traj.beta_b), 2e-3);
    EXPECT_LT(sup_distance(o.sim.traj.beta_c, k.traj.beta_c), 2e-3);
    EXPECT_LT(sup_distance(o.sim.fields.alpha_out[0], k.fields.alpha_out[0]), 5e-3);
    // the explicit bath conserves the total to integrator accuracy (~1e-5 at dt=1e-3)
    for (std::size_t i = 0; i < g.n_samples; i += 250) EXPECT_NEAR(o.total[i], o.supplied, 1e-4);
}

TEST(Oracle, RecurrenceGuard) {
    const auto g = TimeGrid::covering(2.0, 1e-3);
    DiscretizedBathConfig cfg;
    cfg.n_modes = 11;
    EXPECT_THROW(simulate_discretized_bath({30 * pi, 40, 6 * pi, 0, 0}, {{10.0, 2.31}}, constant(g, 1.0), cfg, g),
                 ValidationError);
}
