#include <doctest.h>
#include <jumptime/topology.hpp>
#include <jumptime/verification.hpp>

using namespace jumptime;

TEST_CASE("ssh jumptime phase steps at v = w") {
    auto const d = DissipatorSpec::collective();
    CHECK(jumptime_phase(JumptimeKernel(models::ssh(0.2, 0.5), d)).value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(jumptime_phase(JumptimeKernel(models::ssh(0.5, 0.2), d)).value) < 1e-9);
    CHECK_THROWS_AS(jumptime_phase(JumptimeKernel(models::ssh(0.5, 0.5), d)), DomainError);
}

TEST_CASE("phase is independent of gamma for chiral models") {
    for (double g : {0.1, 1.0, 10.0}) {
        auto const p = jumptime_phase(JumptimeKernel(models::ssh(0.2, 0.5), DissipatorSpec::collective(Sublattice::A, g)));
        CHECK(p.value == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(p.quadrature.converged);
    }
}

TEST_CASE("connection agrees with the closed form and is real") {
    JumptimeKernel const k(models::ssh(0.3, 0.8), DissipatorSpec::collective());
    for (double p : {0.2, 1.5, 3.0}) {
        auto const c = jumptime_connection(k, {p, 0}, 0);
        REQUIRE(c.closed_form);
        CHECK(c.value == doctest::Approx(*c.closed_form).epsilon(1e-8));
        CHECK(std::abs(c.imag) < 1e-8);
    }
}

TEST_CASE("residual terms close the phase identity with h_z") {
    Mat2 const z = 0.4 * pauli::z();
    Mat2 const zs = (0.25 / (2.0 * I)) * pauli::z();
    auto const m = models::ssh(0.3, 0.9).plus({{{0, 0}, z}, {{1, 0}, zs}, {{-1, 0}, zs.adjoint()}});
    auto const report = topology_report(m, DissipatorSpec::collective(Sublattice::A, 0.8));
    REQUIRE(report.axes.size() == 1);
    auto const& a = report.axes[0];
    REQUIRE(a.residuals);
    CHECK(a.identity_defect < 1e-7);
    CHECK(std::abs(a.residuals->r1 + a.residuals->r2) > 1e-4);
}

TEST_CASE("kernel phase of a generic function matches the kernel route") {
    auto const model = models::ssh(0.3, 0.8);
    auto const q = kernel_phase([&](Momentum const& p, Momentum const& p2) { return k_cc(model, p, p2); }, 1);
    CHECK(q.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("kick families share the phase through the G-weighted double sum") {
    QuadratureOptions q;
    q.start_points = 64;
    q.max_points = 256;
    auto const p = jumptime_phase(JumptimeKernel(models::ssh(0.2, 0.5), DissipatorSpec::kick(KickDistribution::gaussian(1.0))), 0, q);
    REQUIRE(p.kick_double_sum);
    CHECK(*p.kick_double_sum == doctest::Approx(p.value).epsilon(1e-10));
}

TEST_CASE("transformation law on a doubly winding model") {
    auto const m = fixtures::chiral_model(2, {{{0, 0}, 0.3}, {{-1, -1}, 1.0}});
    auto const d = DissipatorSpec::collective();
    JumptimeKernel const k(m, d);
    std::array<double, 2> const t{jumptime_phase(k, 0).value, jumptime_phase(k, 1).value};
    CHECK(t[0] == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(t[1] == doctest::Approx(-1.0).epsilon(1e-8));
    auto const out = transform_phases(t, m, d, 1);
    CHECK(std::abs(out.recomputed[0]) < 1e-7);
    CHECK(out.max_deviation < 1e-6);
    CHECK_THROWS_AS(transform_phases({t[0] + 0.5, t[1]}, m, d, 1), ConsistencyError);
}

TEST_CASE("supplementary checks pass") {
    for (auto const& r : supplementary_checks()) {
        INFO(r.id, " ", r.name, ": ", r.detail);
        CHECK(r.passed);
    }
}
