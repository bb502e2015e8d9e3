#include <doctest.h>
#include <jumptime/reference_solvers.hpp>

using namespace jumptime;

TEST_CASE("jumptime map preserves the trace of dark-free systems") {
    auto const grid = MomentumGrid::line(8);
    auto const system = DenseSystem::build(models::ssh(0.2, 0.5), DissipatorSpec::collective(), grid);
    DenseMatrix rho = localized_density(grid, {0, 0}, Sublattice::A);
    for (int n = 0; n < 3; ++n) {
        auto const step = jumptime_map(rho, system);
        CHECK(step.trace == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((step.rho - step.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
        CHECK_FALSE(step.schur_fallback);
        rho = step.rho;
    }
}

TEST_CASE("Schur route agrees with the eigenbasis route") {
    auto const grid = MomentumGrid::line(6);
    auto const system = DenseSystem::build(models::ssh(0.3, 0.8), DissipatorSpec::kick(KickDistribution::gaussian(1.0)), grid);
    DenseMatrix const rho = localized_density(grid, {1, 0}, Sublattice::A);
    auto const eig = jumptime_map(rho, system);
    auto const schur = jumptime_map(rho, system, 0.0);
    CHECK(schur.schur_fallback);
    CHECK((eig.rho - schur.rho).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("jumptime map at a dark contact") {
    // h_z sigma_z keeps |A> stationary; the A part of the state never jumps
    auto const grid = MomentumGrid::line(4);
    ModelSpec const model(1, {{{0, 0}, 0.7 * pauli::z()}}, "detuned");
    auto const system = DenseSystem::build(model, DissipatorSpec::collective(), grid);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(8);
    psi(0) = std::sqrt(0.3);
    psi(1) = std::sqrt(0.7);
    auto const first = jumptime_map(psi * psi.adjoint(), system);
    CHECK(first.trace == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(first.dark_modes > 0);
    auto const second = jumptime_map(first.rho, system);
    CHECK(std::abs(second.trace) < 1e-12);

    // coupling a non-decaying mode to a jump channel diverges
    auto const hop = DenseSystem::build(models::ssh(0.2, 0.5), DissipatorSpec::collective(), grid);
    DenseSystem broken = hop;
    broken.heff = hop.hamiltonian;
    CHECK_THROWS_AS(jumptime_map(localized_density(grid, {0, 0}, Sublattice::B), broken), DarkDivergence);
}

TEST_CASE("master equation conserves trace and positivity") {
    auto const grid = MomentumGrid::line(6);
    auto const system = DenseSystem::build(models::ssh(0.4, 0.6), DissipatorSpec::collective(), grid);
    auto const out = integrate_master(localized_density(grid, {0, 0}, Sublattice::B), system, 2.0);
    CHECK(out.rho.trace().real() == doctest::Approx(1.0).epsilon(1e-9));
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(out.rho);
    CHECK(es.eigenvalues().minCoeff() > -1e-9);
}

TEST_CASE("unique and degenerate steady states") {
    auto const grid = MomentumGrid::line(4);
    auto const system = DenseSystem::build(models::ssh(0.3, 0.6), DissipatorSpec::collective(), grid);
    CHECK_THROWS_AS(steady_state_numeric(system), AmbiguityError);
    DenseMatrix rho0 = localized_density(grid, {0, 0}, Sublattice::A);
    auto const ss = steady_state_numeric(system, rho0);
    CHECK(ss.null_dimension >= 4);
    CHECK(ss.residual < 1e-10);
    CHECK(ss.rho.trace().real() == doctest::Approx(1.0));

    // one cell: the steady state is unique
    ModelSpec const single(1, {{{0, 0}, 0.5 * pauli::x()}}, "dimer");
    auto const one = DenseSystem::build(single, DissipatorSpec::collective(), MomentumGrid::line(1));
    auto const unique = steady_state_numeric(one);
    CHECK(unique.null_dimension == 1);
    CHECK(unique.residual < 1e-12);
}

TEST_CASE("trace distance") {
    auto const grid = MomentumGrid::line(2);
    auto const a = localized_density(grid, {0, 0}, Sublattice::A);
    auto const b = localized_density(grid, {1, 0}, Sublattice::A);
    CHECK(trace_distance(a, b) == doctest::Approx(1.0));
    CHECK(trace_distance(a, a) < 1e-15);
}
