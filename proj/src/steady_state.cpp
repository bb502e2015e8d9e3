#include "jumptime/steady_state.hpp"
#include "jumptime/topology.hpp"

#include <cmath>

namespace jumptime {

namespace {

void require_chiral(ModelSpec const& model) {
    double const tol = 1e-12 * std::max(1.0, model.energy_scale());
    for (auto const& hop : model.hoppings())
        if (std::abs(hop.matrix(0, 0) - hop.matrix(1, 1)) > tol)
            throw ValidationError("closed-form steady state is only defined for h_z = 0 models");
}

} // namespace

Eigen::Vector3d bloch_steady_state(ModelSpec const& model, double gamma, Momentum const& p) {
    if (!(gamma > 0))
        throw ValidationError("steady state needs gamma > 0");
    require_chiral(model);
    auto const h = bloch_vector(model, p);
    double const f = (gamma / 2) / (h.h_perp_sq() + gamma * gamma / 8);
    Eigen::Vector3d const r = f * Eigen::Vector3d(h.hy, -h.hx, gamma / 4);
    if (r.norm() > 1 + 1e-12)
        throw ConsistencyError("steady Bloch vector outside the Bloch ball");
    return r;
}

double lindblad_block_residual(ModelSpec const& model, double gamma, Momentum const& p, Eigen::Vector3d const& r) {
    Mat2 const h = bloch_matrix(model, p);
    Mat2 const rho = 0.5 * (Mat2::Identity() + r(0) * pauli::x() + r(1) * pauli::y() + r(2) * pauli::z());
    Mat2 const l = ket_bra(Sublattice::A, Sublattice::B);
    Mat2 const ll = l.adjoint() * l;
    Mat2 const rhs = -I * (h * rho - rho * h) + gamma * (l * rho * l.adjoint() - 0.5 * (ll * rho + rho * ll));
    return rhs.cwiseAbs().maxCoeff();
}

std::vector<Eigen::Vector3d> momentum_bloch_vectors(DenseMatrix const& rho, MomentumGrid const& grid) {
    DenseMatrix const u = momentum_basis(grid);
    DenseMatrix const mom = u.adjoint() * rho * u;
    std::vector<Eigen::Vector3d> out;
    for (int k = 0; k < grid.size(); ++k) {
        Mat2 const block = mom.block<2, 2>(2 * k, 2 * k);
        double const weight = block.trace().real();
        if (!(weight > 0))
            throw Error("momentum block without weight");
        out.emplace_back((pauli::x() * block).trace().real() / weight, (pauli::y() * block).trace().real() / weight,
                         (pauli::z() * block).trace().real() / weight);
    }
    return out;
}

double ssh_steady_current(double v, double w, double gamma) {
    if (!(v > 0) || !(w > 0))
        throw ValidationError("SSH hoppings must be positive");
    if (!(gamma > 0))
        throw ValidationError("steady current needs gamma > 0");
    double const g2 = gamma * gamma;
    double const d = w * w - v * v - g2 / 8;
    return gamma / 4 * (1 + d / std::sqrt(d * d + w * w * g2 / 2));
}

double steady_current_quadrature(double v, double w, double gamma, int points) {
    auto const model = models::ssh(v, w);
    auto const grid = MomentumGrid::line(points);
    // <J> = 2 w Im[(1/N) sum_k e^{-ik} <A|rho_in|B>] for the bond A(j) -> B(j + 1)
    cplx acc = 0;
    for (int i = 0; i < grid.size(); ++i) {
        auto const k = grid.at(i);
        auto const r = bloch_steady_state(model, gamma, k);
        acc += std::polar(1.0, -k[0]) * cplx(r(0), -r(1)) / 2.0;
    }
    return 2 * w * (acc / double(points)).imag();
}

double crossover_width(double gamma, double w) {
    double const top = ssh_steady_current(1e-9 * w, w, gamma);
    auto ratio_at = [&](double level) {
        // current decreases monotonically in v; bisect on log(v / w)
        double lo = std::log(1e-4), hi = std::log(1e4);
        for (int it = 0; it < 200; ++it) {
            double const mid = 0.5 * (lo + hi);
            if (ssh_steady_current(w * std::exp(mid), w, gamma) > level * top)
                lo = mid;
            else
                hi = mid;
        }
        return std::exp(0.5 * (lo + hi));
    };
    return ratio_at(0.1) - ratio_at(0.9);
}

std::vector<CrossoverRow> crossover_sweep(std::vector<double> const& v_over_w, std::vector<double> const& gammas) {
    std::vector<CrossoverRow> rows;
    for (double gamma : gammas) {
        for (double ratio : v_over_w) {
            CrossoverRow row{ratio, gamma, ssh_steady_current(ratio, 1.0, gamma), 0};
            auto const model = models::ssh(ratio, 1.0);
            try {
                JumptimeKernel const kernel(model, DissipatorSpec::collective(Sublattice::A, gamma));
                row.a_times_t = jumptime_phase(kernel).value;
            } catch (DomainError const&) {
                row.a_times_t = std::numeric_limits<double>::quiet_NaN();
            }
            rows.push_back(row);
        }
    }
    return rows;
}

} // namespace jumptime
