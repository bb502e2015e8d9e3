#include <doctest.h>
#include <jumptime/reference_solvers.hpp>
#include <jumptime/trajectory.hpp>

#include <unsupported/Eigen/MatrixFunctions>

using namespace jumptime;

namespace {

PureState start(MomentumGrid const& grid) { return PureState::localized(grid, {0, 0}, Vec2(1, 0)); }

} // namespace

TEST_CASE("closed-form propagator matches the matrix exponential") {
    auto const grid = MomentumGrid::line(6);
    auto const heff = effective_hamiltonian(models::ssh(0.3, 0.9), DissipatorSpec::collective(), grid);
    NoJumpPropagator const prop(heff);
    for (int k = 0; k < grid.size(); ++k)
        for (double tau : {1e-9, 0.3, 2.5}) {
            Mat2 const ref = (-I * tau * heff.blocks[k]).exp();
            CHECK((prop.block(k, tau) - ref).cwiseAbs().maxCoeff() < 1e-12);
        }
}

TEST_CASE("survival is non-increasing and the waiting time hits the threshold") {
    auto const grid = MomentumGrid::line(16);
    auto const heff = effective_hamiltonian(models::ssh(0.2, 0.5), DissipatorSpec::collective(), grid);
    NoJumpPropagator const prop(heff);
    auto const s = start(grid);
    double last = 1.0;
    for (double t = 0; t < 20; t += 0.1) {
        double const surv = prop.survival(s, t);
        CHECK(surv <= last + 1e-14);
        last = surv;
    }
    for (double u : {0.9, 0.5, 0.01}) {
        double const tau = sample_waiting_time(s, prop, u, 1.0, 1e3);
        CHECK(prop.survival(s, tau) == doctest::Approx(u).epsilon(1e-10));
    }
    CHECK_THROWS_AS(evolve_nojump(s, heff, -1.0), ValidationError);
}

TEST_CASE("dark states are reported as trapped") {
    auto const grid = MomentumGrid::line(8);
    auto const model = models::ssh(1.0, 1.0);
    // all weight on sublattice A at k = pi, where h_perp vanishes
    PureState dark{grid, Amplitudes::Zero(grid.size(), 2)};
    dark.amp(4, 0) = 1.0;
    auto const rec = run_trajectory(dark, model, DissipatorSpec::collective(), 3, 1);
    CHECK(rec.trapped);
    CHECK(rec.jumps.empty());

    EnsembleConfig cfg;
    cfg.trajectories = 4;
    cfg.n_max = 2;
    CHECK_THROWS_AS(ensemble_average(model, DissipatorSpec::collective(), dark, cfg), DarkTrapped);
}

TEST_CASE("norm discipline and reproducible records") {
    auto const grid = MomentumGrid::line(32);
    auto const model = models::ssh(0.2, 0.5);
    for (auto const& d : {DissipatorSpec::collective(), DissipatorSpec::kick(KickDistribution::uniform()),
                          DissipatorSpec::mixture({DissipatorSpec::collective(Sublattice::A, 0.5),
                                                   DissipatorSpec::sublattice(Sublattice::B, 0.5)})}) {
        TrajectorySimulator const sim(model, d, grid);
        auto const a = sim.run(start(grid), 5, 99, 3, [](int, double, PureState const& s) {
            CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-10));
        });
        auto const b = sim.run(start(grid), 5, 99, 3);
        REQUIRE(a.jumps.size() == 5);
        for (std::size_t n = 0; n < a.jumps.size(); ++n) {
            CHECK(a.jumps[n].time == b.jumps[n].time);
            CHECK(a.jumps[n].kick == b.jumps[n].kick);
            CHECK(a.snapshots[n + 1].x[0] == b.snapshots[n + 1].x[0]);
        }
    }
}

TEST_CASE("ensembles do not depend on the thread count") {
    auto const grid = MomentumGrid::line(32);
    EnsembleConfig cfg;
    cfg.trajectories = 100;
    cfg.n_max = 3;
    cfg.chunk = 7;
    cfg.threads = 1;
    auto const one = ensemble_average(models::ssh(0.2, 0.5), DissipatorSpec::collective(), start(grid), cfg);
    cfg.threads = 3;
    auto const three = ensemble_average(models::ssh(0.2, 0.5), DissipatorSpec::collective(), start(grid), cfg);
    for (int n = 0; n <= 3; ++n)
        for (std::size_t i = 0; i < scalar_names.size(); ++i) {
            CHECK(one.slots[n].scalars[i].mean == three.slots[n].scalars[i].mean);
            CHECK(one.slots[n].scalars[i].m2 == three.slots[n].scalars[i].m2);
        }
}

TEST_CASE("running statistics merge like a single pass") {
    RunningStats all, left, right;
    for (int i = 0; i < 50; ++i) {
        double const x = std::sin(i * 1.7) + 0.1 * i;
        all.add(x);
        (i < 20 ? left : right).add(x);
    }
    left.merge(right);
    CHECK(left.count == all.count);
    CHECK(left.mean == doctest::Approx(all.mean).epsilon(1e-14));
    CHECK(left.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
}

TEST_CASE("walltime readout follows the master equation for directional hopping") {
    auto const grid = MomentumGrid::line(32);
    auto const model = models::directional_chain(0.25);
    auto const diss = DissipatorSpec::directional_hop();
    EnsembleConfig cfg;
    cfg.trajectories = 2000;
    cfg.readout = Readout::Walltime;
    cfg.times = {0.0, 1.0, 2.0};
    auto const acc = ensemble_average(model, diss, start(grid), cfg);
    auto const system = DenseSystem::build(model, diss, grid);
    DenseMatrix rho = localized_density(grid, {0, 0}, Sublattice::A);
    double now = 0;
    for (std::size_t i = 0; i < cfg.times.size(); ++i) {
        rho = integrate_master(rho, system, cfg.times[i] - now).rho;
        now = cfg.times[i];
        auto const& s = acc.slots[i].scalars[0];
        double const exact = dense_mean_position(rho, grid, 0, 0);
        CHECK(exact == doctest::Approx(cfg.times[i]).epsilon(1e-7));
        CHECK(std::abs(s.mean - exact) <= 4 * s.std_err() + 1e-12);
    }
}
