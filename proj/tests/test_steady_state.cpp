#include <doctest.h>
#include <jumptime/steady_state.hpp>

using namespace jumptime;

TEST_CASE("steady Bloch vector") {
    auto const ssh = models::ssh(0.4, 0.4);
    auto const dark = bloch_steady_state(ssh, 1.0, {std::numbers::pi, 0});
    CHECK(dark(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(dark(1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(dark(2) == doctest::Approx(1.0));

    auto const m = models::ssh(0.3, 0.7);
    for (double p : {0.0, 1.0, 2.5}) {
        auto const r = bloch_steady_state(m, 0.6, {p, 0});
        CHECK(r.norm() <= 1.0);
        CHECK(r(2) > 0);
        CHECK(lindblad_block_residual(m, 0.6, {p, 0}, r) < 1e-14);
    }
    Mat2 const z = 0.2 * pauli::z();
    CHECK_THROWS_AS(bloch_steady_state(m.plus({{{0, 0}, z}}), 1.0, {0, 0}), ValidationError);
}

TEST_CASE("current closed form against the zone sum") {
    for (auto const& [v, w, g] : {std::tuple{0.2, 0.5, 1.0}, std::tuple{0.5, 0.2, 0.3}, std::tuple{1.0, 1.0, 0.1}})
        CHECK(ssh_steady_current(v, w, g) == doctest::Approx(steady_current_quadrature(v, w, g)).epsilon(1e-10));
    CHECK_THROWS_AS(ssh_steady_current(0.0, 1.0, 1.0), ValidationError);
}

TEST_CASE("crossover narrows with gamma") {
    CHECK(crossover_width(0.05) < crossover_width(0.5));
    auto const rows = crossover_sweep({0.5, 2.0}, {0.5});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].a_times_t == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(rows[1].a_times_t) < 1e-8);
    CHECK(rows[0].current > rows[1].current);
}
