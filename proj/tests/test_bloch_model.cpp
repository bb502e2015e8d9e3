#include <doctest.h>
#include <jumptime/bloch_model.hpp>
#include <jumptime/state.hpp>
#include <jumptime/topology.hpp>

#include <Eigen/Eigenvalues>

using namespace jumptime;

TEST_CASE("ssh Bloch vector") {
    auto const m = models::ssh(0.3, 0.7);
    for (double k : {0.0, 0.4, 2.0, 5.5}) {
        auto const h = bloch_vector(m, {k, 0});
        CHECK(h.hx == doctest::Approx(0.3 + 0.7 * std::cos(k)));
        CHECK(h.hy == doctest::Approx(-0.7 * std::sin(k)));
        CHECK(h.hz == doctest::Approx(0.0));
        CHECK(h.h0 == doctest::Approx(0.0));
    }
}

TEST_CASE("torus Bloch vector") {
    auto const m = models::torus2d(6, 10, 1);
    Momentum const k{0.7, -1.3};
    auto const h = bloch_vector(m, k);
    CHECK(h.hx == doctest::Approx(6 + 10 * std::cos(k[0])));
    CHECK(h.hy == doctest::Approx(10 * std::sin(k[0]) + 2 * std::sin(k[1])));
    CHECK(h.hz == doctest::Approx(2 * std::cos(k[1])));
}

TEST_CASE("non-Hermitian hopping sets are rejected") {
    Mat2 const ab = ket_bra(Sublattice::A, Sublattice::B);
    CHECK_THROWS_AS(ModelSpec(1, {{{1, 0}, ab}}), ValidationError);
    CHECK_THROWS_AS(ModelSpec(1, {{{0, 0}, ab}}), ValidationError);
    CHECK_THROWS_AS(ModelSpec(3, {}), ValidationError);
    CHECK_NOTHROW(ModelSpec(1, {{{1, 0}, ab}, {{-1, 0}, ab.adjoint()}}));
}

TEST_CASE("analytic derivative matches finite differences") {
    auto const m = models::torus2d(3, 2, 0.7);
    Momentum const k{1.1, 2.3};
    double const d = 1e-6;
    for (int axis = 0; axis < 2; ++axis) {
        Momentum up = k, down = k;
        up[axis] += d;
        down[axis] -= d;
        auto const a = bloch_derivative(m, k, axis);
        auto const hu = bloch_vector(m, up), hd = bloch_vector(m, down);
        CHECK(a.hx == doctest::Approx((hu.hx - hd.hx) / (2 * d)).epsilon(1e-6));
        CHECK(a.hy == doctest::Approx((hu.hy - hd.hy) / (2 * d)).epsilon(1e-6));
        CHECK(a.hz == doctest::Approx((hu.hz - hd.hz) / (2 * d)).epsilon(1e-6));
    }
}

TEST_CASE("real-space spectrum equals the Bloch bands") {
    auto const m = models::ssh(0.4, 1.0);
    int const L = 12;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(real_space_hamiltonian(m, {L, 1}));
    std::vector<double> bands;
    auto const grid = MomentumGrid::line(L);
    for (int i = 0; i < L; ++i) {
        auto const h = bloch_vector(m, grid.at(i));
        bands.push_back(h.h0 + std::sqrt(h.h_perp_sq() + h.hz * h.hz));
        bands.push_back(h.h0 - std::sqrt(h.h_perp_sq() + h.hz * h.hz));
    }
    std::sort(bands.begin(), bands.end());
    for (int i = 0; i < 2 * L; ++i)
        CHECK(es.eigenvalues()(i) == doctest::Approx(bands[i]).epsilon(1e-10));
}

TEST_CASE("lattice smaller than twice the hopping range is rejected") {
    CHECK_THROWS_AS(real_space_hamiltonian(models::ssh(1, 1), {1, 1}), ValidationError);
}

TEST_CASE("momentum state round trip through positions") {
    auto const grid = MomentumGrid::square(4, 5);
    auto const s = PureState::localized(grid, {2, 3}, Vec2(0.6, cplx(0, 0.8)));
    CHECK(s.norm() == doctest::Approx(1.0));
    auto const pos = s.to_position();
    CHECK(std::abs(pos(2 + 4 * 3, 0) - 0.6) < 1e-12);
    CHECK(std::abs(pos(2 + 4 * 3, 1) - cplx(0, 0.8)) < 1e-12);
    auto const back = PureState::from_position(grid, pos);
    CHECK((back.amp - s.amp).norm() < 1e-12);
}

TEST_CASE("dark contact found by refinement") {
    auto const m = models::ssh(1.0, 1.0);
    auto const r = h_perp_min(m, MomentumGrid::line(37));
    CHECK(r.dark_contact);
    CHECK(r.argmin[0] == doctest::Approx(std::numbers::pi).epsilon(1e-6));
    CHECK_FALSE(h_perp_min(models::ssh(0.5, 1.0), MomentumGrid::line(64)).dark_contact);
}

TEST_CASE("symmetry classification") {
    auto const grid = MomentumGrid::line(128);
    auto const ssh = symmetry_check(models::ssh(0.3, 0.8), grid);
    CHECK(ssh.chiral);
    CHECK(ssh.trs);
    CHECK(ssh.inversion);
    CHECK(ssh.residual_forced_zero);

    // odd h_z breaks time reversal and chirality
    Mat2 const z = (0.3 / (2.0 * I)) * pauli::z();
    auto const odd = models::ssh(0.3, 0.8).plus({{{1, 0}, z}, {{-1, 0}, z.adjoint()}});
    auto const s = symmetry_check(odd, grid);
    CHECK_FALSE(s.chiral);
    CHECK_FALSE(s.trs);
    CHECK(s.inversion);
}

TEST_CASE("ssh winding") {
    CHECK(winding_number(models::ssh(0.2, 0.5)).value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(winding_number(models::ssh(0.5, 0.2)).value) < 1e-10);
    CHECK_THROWS_AS(winding_number(models::ssh(0.5, 0.5)), DomainError);
}

TEST_CASE("primitive-vector transformation") {
    auto const m = models::torus2d(6, 10, 1);
    auto const t = transform_primitive_vectors(m, 2);
    Momentum const k{0.4, 1.9};
    auto const a = bloch_vector(t, k);
    auto const b = bloch_vector(m, {k[0], k[1] - 2 * k[0]});
    CHECK(a.hx == doctest::Approx(b.hx));
    CHECK(a.hy == doctest::Approx(b.hy));
    CHECK(a.hz == doctest::Approx(b.hz));
    CHECK(t.primitive_vectors()[1].x() == doctest::Approx(2.0));
    CHECK_THROWS_AS(transform_primitive_vectors(models::ssh(1, 2), 1), ValidationError);
}
