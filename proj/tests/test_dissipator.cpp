#include <doctest.h>
#include <jumptime/dissipator.hpp>

using namespace jumptime;

TEST_CASE("kick weights are normalized") {
    auto const grid = MomentumGrid::line(16);
    for (auto const& g : {KickDistribution::delta(), KickDistribution::uniform(), KickDistribution::gaussian(1.0)}) {
        auto const w = g.weights(grid);
        double sum = 0;
        for (double x : w)
            sum += x;
        CHECK(sum == doctest::Approx(1.0));
    }
    auto const uniform = KickDistribution::uniform().weights(grid);
    CHECK(uniform[3] == doctest::Approx(1.0 / 16));
    auto const delta = KickDistribution::delta().weights(grid);
    CHECK(delta[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS(KickDistribution::from_table({1.0}).weights(grid), ValidationError);
}

TEST_CASE("effective Hamiltonian of collective collapse") {
    auto const model = models::ssh(0.2, 0.5);
    auto const grid = MomentumGrid::line(8);
    auto const heff = effective_hamiltonian(model, DissipatorSpec::collective(Sublattice::A, 2.0), grid);
    for (int k = 0; k < grid.size(); ++k) {
        Mat2 const diff = heff.blocks[k] - bloch_matrix(model, grid.at(k));
        CHECK(std::abs(diff(1, 1) - cplx(0, -1.0)) < 1e-14);
        CHECK(std::abs(diff(0, 0)) < 1e-14);
    }
}

TEST_CASE("mixtures add rates and flatten") {
    auto const mix = DissipatorSpec::mixture(
        {DissipatorSpec::collective(Sublattice::A, 0.5),
         DissipatorSpec::mixture({DissipatorSpec::sublattice(Sublattice::B, 0.25), DissipatorSpec::directional_hop(0.25)})});
    CHECK(mix.components().size() == 3);
    CHECK(mix.total_rate() == doctest::Approx(1.0));
    CHECK(mix.scaled(4).total_rate() == doctest::Approx(4.0));
    CHECK_THROWS_AS(DissipatorSpec::collective(Sublattice::A, -1.0), ValidationError);
}

TEST_CASE("dark set of collective collapse at the transition") {
    auto const grid = MomentumGrid::line(16);
    auto const dark = dark_set_report(models::ssh(1.0, 1.0), DissipatorSpec::collective(), grid);
    CHECK_FALSE(dark.dark_free);
    REQUIRE(dark.contacts.size() == 1);
    CHECK(dark.contacts[0][0] == doctest::Approx(std::numbers::pi));
    CHECK(dark_set_report(models::ssh(0.2, 0.5), DissipatorSpec::collective(), grid).dark_free);
}

TEST_CASE("jumps normalize and move population") {
    auto const grid = MomentumGrid::line(8);
    auto const s = PureState::localized(grid, {0, 0}, Vec2(1, 1));
    auto const d = DissipatorSpec::collective();
    auto const rates = jump_channels(d, s);
    REQUIRE(rates.size() == 1);
    CHECK(rates[0].rate == doctest::Approx(0.5));
    auto const after = apply_jump(d, 0, 0, s);
    CHECK(after.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(after.population(Sublattice::A) == doctest::Approx(1.0));

    auto const a_only = PureState::localized(grid, {0, 0}, Vec2(1, 0));
    CHECK_THROWS_AS(jump_channels(d, a_only), DarkTrapped);
}

TEST_CASE("directional hop shifts by one cell") {
    auto const grid = MomentumGrid::line(8);
    auto const s = PureState::localized(grid, {2, 0}, Vec2(1, 0));
    auto const after = apply_jump(DissipatorSpec::directional_hop(), 0, 0, s);
    CHECK(std::abs(after.to_position()(3, 0)) == doctest::Approx(1.0));
}
