#include <doctest.h>
#include <jumptime/propagators.hpp>

using namespace jumptime;

namespace {

double max_mismatch(JumptimeKernel const& kernel, int points) {
    auto const grid = MomentumGrid::for_model(kernel.model(), points);
    double worst = 0;
    for (int i = 0; i < grid.size(); ++i)
        for (int j = 0; j < grid.size(); j += 3) {
            auto const closed = kernel.components(grid.at(i), grid.at(j));
            auto const numeric = kernel.numeric_components(grid.at(i), grid.at(j));
            for (std::size_t c = 0; c < closed.size(); ++c)
                worst = std::max(worst, std::abs(closed[c] - numeric[c]));
        }
    return worst;
}

} // namespace

TEST_CASE("closed forms agree with the numeric block integral") {
    Mat2 const z = 0.3 * pauli::z();
    auto const with_hz = models::ssh(0.4, 0.9).plus({{{0, 0}, z}});
    CHECK(max_mismatch(JumptimeKernel(models::ssh(0.2, 0.5), DissipatorSpec::collective()), 12) < 1e-10);
    CHECK(max_mismatch(JumptimeKernel(with_hz, DissipatorSpec::collective(Sublattice::A, 1.7)), 12) < 1e-10);
    CHECK(max_mismatch(JumptimeKernel(models::ssh(0.5, 0.2), DissipatorSpec::sublattice(Sublattice::A)), 12) < 1e-10);
    CHECK(max_mismatch(JumptimeKernel(models::ssh(0.5, 0.2), DissipatorSpec::sublattice(Sublattice::B)), 12) < 1e-10);
    auto const mix = DissipatorSpec::mixture(
        {DissipatorSpec::collective(Sublattice::A, 0.3), DissipatorSpec::sublattice(Sublattice::B, 0.7)});
    CHECK(max_mismatch(JumptimeKernel(models::ssh(0.2, 0.5), mix), 12) < 1e-10);
    CHECK(max_mismatch(JumptimeKernel(models::torus2d(6, 10, 1), DissipatorSpec::collective()), 5) < 1e-10);
}

TEST_CASE("kernel is trace preserving on the diagonal and Hermitian") {
    auto const model = models::ssh(0.3, 0.7);
    JumptimeKernel const k(model, DissipatorSpec::collective(Sublattice::A, 0.8));
    CHECK(k.kind() == PropagatorKind::CC);
    for (double p : {0.1, 1.0, 3.0}) {
        CHECK(std::abs(k({p, 0}, {p, 0}) - 1.0) < 1e-12);
        cplx const a = k({p, 0}, {p + 0.4, 0});
        cplx const b = k({p + 0.4, 0}, {p, 0});
        CHECK(std::abs(a - std::conj(b)) < 1e-12);
    }
}

TEST_CASE("kind selection and empirical kernels") {
    auto const model = models::ssh(0.2, 0.5);
    CHECK(JumptimeKernel(models::torus2d(6, 10, 1), DissipatorSpec::collective()).kind() == PropagatorKind::CC2D);
    CHECK(JumptimeKernel(model, DissipatorSpec::kick(KickDistribution::uniform())).kind() == PropagatorKind::CC);
    auto const cc_a = DissipatorSpec::mixture(
        {DissipatorSpec::collective(Sublattice::A, 0.5), DissipatorSpec::sublattice(Sublattice::A, 0.5)});
    JumptimeKernel const e(model, cc_a);
    CHECK(e.kind() == PropagatorKind::Empirical);
    CHECK_FALSE(e.closed_form());
    CHECK(std::abs(e({0.3, 0}, {0.3, 0}) - 1.0) < 1e-12);

    auto const target_b = DissipatorSpec::mixture(
        {DissipatorSpec::collective(Sublattice::A, 0.5), DissipatorSpec::collective(Sublattice::B, 0.5)});
    CHECK_THROWS_AS(invariant_carrier(model, target_b), ValidationError);
}

TEST_CASE("sublattice kernel needs h_z = 0 and no dark contact") {
    Mat2 const z = 0.3 * pauli::z();
    auto const with_hz = models::ssh(0.4, 0.9).plus({{{0, 0}, z}});
    CHECK_THROWS_AS(k_sublattice(with_hz, Sublattice::A, {0.1, 0}, {0.2, 0}), ValidationError);
    CHECK_THROWS_AS(k_cc(models::ssh(1, 1), {std::numbers::pi, 0}, {0.2, 0}), DomainError);
}

TEST_CASE("kernel evolution reproduces the dense map") {
    auto const model = models::ssh(0.2, 0.5);
    auto const grid = MomentumGrid::line(8);
    for (auto const& d : {DissipatorSpec::collective(), DissipatorSpec::kick(KickDistribution::gaussian(1.0))}) {
        JumptimeKernel const kernel(model, d);
        auto const system = DenseSystem::build(model, d, grid);
        DenseMatrix rho = localized_density(grid, {2, 0}, Sublattice::A);
        auto rk = DensityKernel::localized(grid, {2, 0}, kernel.carrier());
        for (int n = 0; n < 3; ++n) {
            rho = jumptime_map(rho, system).rho;
            rk = evolve_kernel(rk, kernel, 1);
            CHECK((rk.to_dense() - rho).cwiseAbs().maxCoeff() < 1e-10);
        }
        auto const back = DensityKernel::from_dense(rho, grid, kernel.carrier());
        CHECK((back.rho - rk.rho).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("displacement and the seam flag") {
    auto const grid = MomentumGrid::line(16);
    auto const carrier = ket_bra(Sublattice::A, Sublattice::A);
    auto const here = mean_displacement(DensityKernel::localized(grid, {3, 0}, carrier), 0);
    CHECK(here.value == doctest::Approx(3.0));
    CHECK_FALSE(here.seam_flag);
    auto const edge = mean_displacement(DensityKernel::localized(grid, {8, 0}, carrier), 0);
    CHECK(edge.seam_flag);
    auto const dist = DensityKernel::homogeneous(grid, carrier).position_distribution();
    double total = 0;
    for (double p : dist)
        total += p;
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("analytic kernel derivative matches the differentiated solve and finite differences") {
    Mat2 const z = 0.3 * pauli::z();
    auto const with_hz = models::ssh(0.4, 0.9).plus({{{0, 0}, z}});
    auto const mix = DissipatorSpec::mixture(
        {DissipatorSpec::collective(Sublattice::A, 0.3), DissipatorSpec::sublattice(Sublattice::B, 0.7)});
    std::vector<std::pair<ModelSpec, DissipatorSpec>> const cases{
        {models::ssh(0.2, 0.5), DissipatorSpec::collective()},
        {with_hz, DissipatorSpec::collective(Sublattice::A, 1.7)},
        {models::ssh(0.5, 0.2), DissipatorSpec::sublattice(Sublattice::A)},
        {models::ssh(0.2, 0.5), mix},
        {models::torus2d(6, 10, 1), DissipatorSpec::collective()},
        {models::directional_chain(0.25), DissipatorSpec::directional_hop()},
    };
    for (auto const& [model, diss] : cases) {
        JumptimeKernel const k(model, diss);
        for (double p : {0.2, 1.3, 2.9}) {
            Momentum const q{p, 0.7};
            for (int axis = 0; axis < model.dimension(); ++axis) {
                cplx const analytic = k.derivative(q, axis);
                CHECK(std::abs(analytic - k.numeric_derivative(q, axis)) < 1e-10);
                double const d = 1e-5;
                Momentum lo = q, hi = q;
                lo[axis] -= d;
                hi[axis] += d;
                cplx const fd = (k(hi, q) - k(lo, q)) / (2 * d);
                CHECK(std::abs(analytic - fd) < 1e-6);
            }
        }
    }
}

TEST_CASE("dense kernels reject grids beyond the size limit") {
    auto const big = MomentumGrid::square(128, 128);
    CHECK_THROWS_AS(DensityKernel::homogeneous(big, Mat2::Identity()), ValidationError);
    CHECK_NOTHROW(DensityKernel::homogeneous(MomentumGrid::square(32, 32), Mat2::Identity()));
}
