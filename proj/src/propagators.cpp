#include "jumptime/propagators.hpp"

#include <cmath>

namespace jumptime {

namespace {

void require_bright(ModelSpec const& model, BlochVector const& h, Momentum const& k) {
    if (h.h_perp() <= dark_tolerance(model))
        throw DomainError("dark contact at k = (" + std::to_string(k[0]) + ", " + std::to_string(k[1]) +
                          "): h_perp = " + std::to_string(h.h_perp()));
}

bool diagonal_hamiltonian(ModelSpec const& model) {
    for (auto const& hop : model.hoppings())
        if (std::abs(hop.matrix(0, 1)) > 0 || std::abs(hop.matrix(1, 0)) > 0)
            return false;
    return true;
}

bool chiral(ModelSpec const& model) {
    for (auto const& hop : model.hoppings())
        if (std::abs(hop.matrix(0, 0) - hop.matrix(1, 1)) > 1e-14 * std::max(1.0, model.energy_scale()))
            return false;
    return true;
}

/// Sublattices read (domain) and written (range) by an intracell factor.
std::pair<std::vector<int>, std::vector<int>> support(Mat2 const& m) {
    std::vector<int> reads, writes;
    for (int s = 0; s < 2; ++s) {
        if (m.col(s).norm() > 0)
            reads.push_back(s);
        if (m.row(s).norm() > 0)
            writes.push_back(s);
    }
    return {reads, writes};
}

} // namespace

cplx k_cc(ModelSpec const& model, Momentum const& p, Momentum const& p2, double gamma) {
    auto const h1 = bloch_vector(model, p);
    auto const h2 = bloch_vector(model, p2);
    require_bright(model, h1, p);
    require_bright(model, h2, p2);
    double const z1 = h1.hz, z2 = h2.hz;
    cplx const a = h1.h_perp_sq() - h2.h_perp_sq() + z1 * z1 - z2 * z2 + I * gamma * (z1 + z2) / 2.0;
    cplx const b = h1.h_perp_sq() + h2.h_perp_sq() + z1 * z1 + z2 * z2 + I * gamma * (z1 - z2) / 2.0;
    cplx const num = 2.0 * gamma * gamma * cplx(h1.hx, h1.hy) * cplx(h2.hx, -h2.hy);
    return num / (2.0 * a * a + gamma * gamma * b);
}

cplx k_cc_derivative(ModelSpec const& model, Momentum const& p, Momentum const& p2, int axis, double gamma) {
    auto const h1 = bloch_vector(model, p);
    auto const h2 = bloch_vector(model, p2);
    require_bright(model, h1, p);
    require_bright(model, h2, p2);
    auto const dh = bloch_derivative(model, p, axis);
    double const z1 = h1.hz, z2 = h2.hz, g2 = gamma * gamma;
    cplx const a = h1.h_perp_sq() - h2.h_perp_sq() + z1 * z1 - z2 * z2 + I * gamma * (z1 + z2) / 2.0;
    cplx const b = h1.h_perp_sq() + h2.h_perp_sq() + z1 * z1 + z2 * z2 + I * gamma * (z1 - z2) / 2.0;
    cplx const u2 = cplx(h2.hx, -h2.hy);
    cplx const num = 2.0 * g2 * cplx(h1.hx, h1.hy) * u2;
    cplx const den = 2.0 * a * a + g2 * b;

    // a and b share their h1 derivatives
    cplx const dab = 2.0 * (h1.hx * dh.hx + h1.hy * dh.hy) + (2.0 * z1 + I * gamma / 2.0) * dh.hz;
    cplx const dnum = 2.0 * g2 * u2 * cplx(dh.hx, dh.hy);
    cplx const dden = (4.0 * a + g2) * dab;
    return (dnum * den - num * dden) / (den * den);
}

double k_sublattice_derivative(ModelSpec const& model, Momentum const& p, Momentum const& p2, int axis,
                               double gamma) {
    // throws like the kernel itself
    k_sublattice(model, Sublattice::A, p, p2, gamma);
    auto const h1 = bloch_vector(model, p);
    auto const h2 = bloch_vector(model, p2);
    auto const dh = bloch_derivative(model, p, axis);
    double const s1 = h1.h_perp_sq(), s2 = h2.h_perp_sq(), g2 = gamma * gamma;
    double const den = 2.0 * (s1 - s2) * (s1 - s2) + g2 * (s1 + s2);
    double const ds1 = 2.0 * (h1.hx * dh.hx + h1.hy * dh.hy);
    return g2 * (den - (s1 + s2) * (4.0 * (s1 - s2) + g2)) / (den * den) * ds1;
}

cplx k_cc_2d(ModelSpec const& model, Momentum const& p, Momentum const& p2, double gamma) {
    return k_cc(model, p, p2, gamma);
}

double k_sublattice(ModelSpec const& model, Sublattice, Momentum const& p, Momentum const& p2, double gamma) {
    auto const h1 = bloch_vector(model, p);
    auto const h2 = bloch_vector(model, p2);
    double const tol = 1e-10 * std::max(1.0, model.energy_scale());
    if (std::abs(h1.hz) > tol || std::abs(h2.hz) > tol)
        throw ValidationError("sublattice propagator closed form requires h_z = 0");
    require_bright(model, h1, p);
    require_bright(model, h2, p2);
    double const s1 = h1.h_perp_sq(), s2 = h2.h_perp_sq();
    double const g2 = gamma * gamma;
    return g2 * (s1 + s2) / (2.0 * (s1 - s2) * (s1 - s2) + g2 * (s1 + s2));
}

cplx k_mixture(ModelSpec const& model, double gamma_cc, double gamma_b, Momentum const& p, Momentum const& p2) {
    if (gamma_cc < 0 || gamma_b < 0 || !(gamma_cc + gamma_b > 0))
        throw ValidationError("mixture rates must be nonnegative with a positive sum");
    double const gamma = gamma_cc + gamma_b;
    cplx out = 0;
    if (gamma_cc > 0)
        out += (gamma_cc / gamma) * k_cc(model, p, p2, gamma);
    if (gamma_b > 0)
        out += (gamma_b / gamma) * k_sublattice(model, Sublattice::B, p, p2, gamma);
    return out;
}

std::string to_string(PropagatorKind kind) {
    switch (kind) {
    case PropagatorKind::CC: return "cc";
    case PropagatorKind::CC2D: return "cc_2d";
    case PropagatorKind::SublatticeA: return "sublattice_A";
    case PropagatorKind::SublatticeB: return "sublattice_B";
    case PropagatorKind::MixtureCCB: return "mixture_cc_B";
    case PropagatorKind::Empirical: return "empirical";
    }
    return "?";
}

Mat2 invariant_carrier(ModelSpec const& model, DissipatorSpec const& dissipator) {
    auto const& comps = dissipator.components();
    if (comps.empty())
        throw ValidationError("empty dissipator");

    bool const all_hops = std::all_of(comps.begin(), comps.end(),
                                      [](auto const& c) { return c.kind == ChannelKind::DirectionalHop; });
    if (all_hops) {
        if (!diagonal_hamiltonian(model))
            throw ValidationError("directional hopping has no invariant intracell state for interband models");
        return ket_bra(Sublattice::A, Sublattice::A);
    }

    std::vector<int> writes, reads;
    for (auto const& c : comps) {
        if (c.kind == ChannelKind::DirectionalHop)
            throw ValidationError("directional hopping cannot be mixed with intracell collapse");
        auto const [r, w] = support(c.intracell());
        if (r.size() != 1 || w.size() != 1)
            throw ValidationError("jump family without a single source and target sublattice");
        reads.push_back(r[0]);
        writes.push_back(w[0]);
    }

    Mat2 carrier = Mat2::Zero();
    if (std::all_of(writes.begin(), writes.end(), [&](int s) { return s == writes[0]; })) {
        carrier(writes[0], writes[0]) = 1.0;
        return carrier;
    }
    if (std::all_of(reads.begin(), reads.end(), [&](int s) { return s == reads[0]; })) {
        for (std::size_t i = 0; i < comps.size(); ++i)
            carrier(writes[i], writes[i]) += comps[i].rate;
        return carrier / dissipator.total_rate();
    }
    throw ValidationError("dissipator components share no invariant intracell state");
}

JumptimeKernel::JumptimeKernel(ModelSpec model, DissipatorSpec dissipator)
    : hamiltonian(std::move(model)), channels(std::move(dissipator)) {
    intracell = invariant_carrier(hamiltonian, channels);
    damping = (0.5 * I) * decay_operator(channels);

    auto const& comps = channels.components();
    bool const is_2d = hamiltonian.dimension() == 2;
    auto is_cc = [](DissipatorComponent const& c) {
        return (c.kind == ChannelKind::Collective && c.target == Sublattice::A) || c.kind == ChannelKind::Kick;
    };
    auto is_proj = [](DissipatorComponent const& c, Sublattice s) {
        return c.kind == ChannelKind::SublatticeProjector && c.target == s;
    };

    if (comps.size() == 1 && is_cc(comps[0]))
        tag = is_2d ? PropagatorKind::CC2D : PropagatorKind::CC;
    else if (comps.size() == 1 && chiral(hamiltonian) && is_proj(comps[0], Sublattice::A))
        tag = PropagatorKind::SublatticeA;
    else if (comps.size() == 1 && chiral(hamiltonian) && is_proj(comps[0], Sublattice::B))
        tag = PropagatorKind::SublatticeB;
    else if (comps.size() == 2 && chiral(hamiltonian) && comps[0].kind == ChannelKind::Collective &&
             comps[0].target == Sublattice::A && is_proj(comps[1], Sublattice::B))
        tag = PropagatorKind::MixtureCCB;
    else
        tag = PropagatorKind::Empirical;
}

std::vector<cplx> JumptimeKernel::components(Momentum const& p, Momentum const& p2) const {
    double const gamma = channels.total_rate();
    auto const& comps = channels.components();
    switch (tag) {
    case PropagatorKind::CC:
    case PropagatorKind::CC2D:
        return {k_cc(hamiltonian, p, p2, gamma)};
    case PropagatorKind::SublatticeA:
    case PropagatorKind::SublatticeB:
        return {cplx(k_sublattice(hamiltonian, comps[0].target, p, p2, gamma))};
    case PropagatorKind::MixtureCCB: {
        // both channels read B, so each carries its rate share of the total
        cplx const total = k_mixture(hamiltonian, comps[0].rate, comps[1].rate, p, p2);
        return {(comps[0].rate / gamma) * total, (comps[1].rate / gamma) * total};
    }
    case PropagatorKind::Empirical:
        break;
    }
    return numeric_components(p, p2);
}

cplx JumptimeKernel::operator()(Momentum const& p, Momentum const& p2) const {
    cplx total = 0;
    for (auto const& c : components(p, p2))
        total += c;
    return total;
}

cplx JumptimeKernel::derivative(Momentum const& p, int axis) const {
    double const gamma = channels.total_rate();
    auto const& comps = channels.components();
    switch (tag) {
    case PropagatorKind::CC:
    case PropagatorKind::CC2D:
        return k_cc_derivative(hamiltonian, p, p, axis, gamma);
    case PropagatorKind::SublatticeA:
    case PropagatorKind::SublatticeB:
        return k_sublattice_derivative(hamiltonian, p, p, axis, gamma);
    case PropagatorKind::MixtureCCB:
        return (comps[0].rate / gamma) * k_cc_derivative(hamiltonian, p, p, axis, gamma) +
               (comps[1].rate / gamma) * k_sublattice_derivative(hamiltonian, p, p, axis, gamma);
    case PropagatorKind::Empirical:
        break;
    }
    return numeric_derivative(p, axis);
}

namespace {

/// Row-major vectorization of X -> i A X - i X B^dagger.
Eigen::Matrix4cd sylvester_operator(Mat2 const& a, Mat2 const& b) {
    Eigen::Matrix4cd op;
    Mat2 const id = Mat2::Identity();
    Mat2 const bc = b.conjugate();
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            for (int r2 = 0; r2 < 2; ++r2)
                for (int c2 = 0; c2 < 2; ++c2)
                    op(2 * r + c, 2 * r2 + c2) = I * a(r, r2) * id(c, c2) - I * id(r, r2) * bc(c, c2);
    return op;
}

Mat2 unvec(Eigen::Vector4cd const& v) {
    Mat2 x;
    x << v(0), v(1), v(2), v(3);
    return x;
}

} // namespace

cplx JumptimeKernel::numeric_derivative(Momentum const& p, int axis) const {
    Mat2 const a = bloch_matrix(hamiltonian, p) - damping;
    Eigen::PartialPivLU<Eigen::Matrix4cd> lu(sylvester_operator(a, a));
    if (lu.rcond() < 1e-13)
        throw DomainError("jumptime integral diverges at a dark contact (k = " + std::to_string(p[0]) + ", " +
                          std::to_string(p[1]) + ")");
    Eigen::Vector4cd const rhs(intracell(0, 0), intracell(0, 1), intracell(1, 0), intracell(1, 1));
    Eigen::Vector4cd const xv = lu.solve(rhs);

    // only the left factor depends on p: d(op) = i dH (x) 1
    auto const dh = bloch_derivative(hamiltonian, p, axis).matrix();
    Eigen::Matrix4cd dop = Eigen::Matrix4cd::Zero();
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            for (int r2 = 0; r2 < 2; ++r2)
                dop(2 * r + c, 2 * r2 + c) = I * dh(r, r2);
    Mat2 const x = unvec(xv);
    Mat2 const dx = unvec(lu.solve(-(dop * xv)));

    cplx total = 0;
    for (auto const& c : channels.components()) {
        Mat2 const m = c.intracell();
        cplx const phase = c.momentum_phase(p) * std::conj(c.momentum_phase(p));
        // d/dp of momentum_phase(p) for the hop axis, zero otherwise
        cplx const dphase = (c.kind == ChannelKind::DirectionalHop && c.axis == axis) ? -I * phase : cplx(0);
        total += c.rate * (dphase * (m * x * m.adjoint()).trace() + phase * (m * dx * m.adjoint()).trace());
    }
    return total;
}

std::vector<cplx> JumptimeKernel::numeric_components(Momentum const& p, Momentum const& p2) const {
    Mat2 const a = bloch_matrix(hamiltonian, p) - damping;
    Mat2 const b = bloch_matrix(hamiltonian, p2) - damping;

    // i A X - i X B^dagger = carrier, row-major vec(X) = (x00, x01, x10, x11)
    Eigen::Vector4cd rhs(intracell(0, 0), intracell(0, 1), intracell(1, 0), intracell(1, 1));
    Eigen::PartialPivLU<Eigen::Matrix4cd> lu(sylvester_operator(a, b));
    if (lu.rcond() < 1e-13)
        throw DomainError("jumptime integral diverges at a dark contact (k = " + std::to_string(p[0]) + ", " +
                          std::to_string(p[1]) + ")");
    Mat2 const x = unvec(lu.solve(rhs));

    std::vector<cplx> out;
    for (auto const& c : channels.components()) {
        Mat2 const m = c.intracell();
        cplx const phase = c.momentum_phase(p) * std::conj(c.momentum_phase(p2));
        out.push_back(c.rate * phase * (m * x * m.adjoint()).trace());
    }
    return out;
}

namespace {

// a dense N x N kernel; 128 x 128 momenta would need about 4 GB
void require_kernel_size(MomentumGrid const& grid) {
    if (grid.size() > 4096)
        throw ValidationError("momentum kernel over " + std::to_string(grid.size()) +
                              " grid points exceeds the 4096-point limit");
}

} // namespace

DensityKernel DensityKernel::localized(MomentumGrid const& grid, std::array<int, 2> cell, Mat2 const& carrier) {
    require_kernel_size(grid);
    int const n = grid.size();
    Eigen::VectorXcd amp(n);
    for (int k = 0; k < n; ++k) {
        auto const km = grid.at(k);
        amp(k) = std::polar(1.0 / std::sqrt(double(n)), -(cell[0] * km[0] + cell[1] * km[1]));
    }
    return {grid, amp * amp.adjoint(), carrier};
}

DensityKernel DensityKernel::homogeneous(MomentumGrid const& grid, Mat2 const& carrier) {
    require_kernel_size(grid);
    int const n = grid.size();
    return {grid, Eigen::MatrixXcd::Identity(n, n) / double(n), carrier};
}

DenseMatrix DensityKernel::to_dense() const {
    int const n = grid.size();
    DenseMatrix mom = DenseMatrix::Zero(2 * n, 2 * n);
    for (int k = 0; k < n; ++k)
        for (int k2 = 0; k2 < n; ++k2)
            mom.block<2, 2>(2 * k, 2 * k2) = rho(k, k2) * carrier;
    DenseMatrix const u = momentum_basis(grid);
    return u * mom * u.adjoint();
}

DensityKernel DensityKernel::from_dense(DenseMatrix const& dense, MomentumGrid const& grid, Mat2 const& carrier) {
    int const n = grid.size();
    DenseMatrix const u = momentum_basis(grid);
    DenseMatrix const mom = u.adjoint() * dense * u;
    double const weight = (carrier.adjoint() * carrier).trace().real();
    DensityKernel out{grid, Eigen::MatrixXcd::Zero(n, n), carrier};
    for (int k = 0; k < n; ++k)
        for (int k2 = 0; k2 < n; ++k2)
            out.rho(k, k2) = (carrier.adjoint() * mom.block<2, 2>(2 * k, 2 * k2)).trace() / weight;
    return out;
}

std::vector<double> DensityKernel::position_distribution() const {
    int const n = grid.size();
    int const n1 = grid.points[0], n2 = grid.points[1];
    // S(d) = sum_k rho(k, k - d), then rho(j, j) = (1/N) sum_d exp(i j.d dk) S(d)
    Eigen::VectorXcd s = Eigen::VectorXcd::Zero(n);
    for (int k = 0; k < n; ++k) {
        auto const [m1, m2] = grid.unflatten(k);
        for (int d = 0; d < n; ++d) {
            auto const [d1, d2] = grid.unflatten(d);
            s(d) += rho(k, grid.flatten(m1 - d1, m2 - d2));
        }
    }
    std::vector<double> out(n);
    for (int j = 0; j < n; ++j) {
        auto const [j1, j2] = grid.unflatten(j);
        cplx acc = 0;
        for (int d = 0; d < n; ++d) {
            auto const [d1, d2] = grid.unflatten(d);
            double const arg = two_pi * (double(j1 * d1 % n1) / n1 + double(j2 * d2 % n2) / n2);
            acc += std::polar(1.0, arg) * s(d);
        }
        out[j] = acc.real() / n;
    }
    return out;
}

DensityKernel evolve_kernel(DensityKernel const& rho, JumptimeKernel const& kernel, int steps) {
    if (steps < 0)
        throw ValidationError("kernel evolution needs steps >= 0");
    auto const& grid = rho.grid;
    int const n = grid.size();
    auto const& comps = kernel.dissipator().components();

    // tabulate every component on the grid once
    std::vector<Eigen::MatrixXcd> table(comps.size(), Eigen::MatrixXcd(n, n));
    std::vector<Momentum> ks(n);
    for (int k = 0; k < n; ++k)
        ks[k] = grid.at(k);
    for (int k = 0; k < n; ++k)
        for (int k2 = 0; k2 < n; ++k2) {
            auto const c = kernel.components(ks[k], ks[k2]);
            for (std::size_t j = 0; j < comps.size(); ++j)
                table[j](k, k2) = c[j];
        }

    std::vector<std::vector<double>> weights(comps.size());
    for (std::size_t j = 0; j < comps.size(); ++j)
        if (comps[j].kind == ChannelKind::Kick)
            weights[j] = comps[j].kick.weights(grid);

    // index of k - q on the ring
    auto shift_index = [&](int k, int q) {
        auto const [m1, m2] = grid.unflatten(k);
        auto const [q1, q2] = grid.unflatten(q);
        return grid.flatten(m1 - q1, m2 - q2);
    };

    DensityKernel out = rho;
    for (int step = 0; step < steps; ++step) {
        Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(n, n);
        for (std::size_t j = 0; j < comps.size(); ++j) {
            Eigen::MatrixXcd const product = table[j].cwiseProduct(out.rho);
            if (weights[j].empty()) {
                next += product;
                continue;
            }
            std::vector<int> idx(n);
            for (int q = 0; q < n; ++q) {
                double const w = weights[j][q];
                if (w == 0)
                    continue;
                for (int k = 0; k < n; ++k)
                    idx[k] = shift_index(k, q);
                for (int k2 = 0; k2 < n; ++k2)
                    for (int k = 0; k < n; ++k)
                        next(k, k2) += w * product(idx[k], idx[k2]);
            }
        }
        out.rho = std::move(next);
    }
    return out;
}

Displacement mean_displacement(DensityKernel const& rho, int axis, int center, int seam_width, double seam_limit) {
    auto const& grid = rho.grid;
    auto const occ = rho.position_distribution();
    double total = 0, weighted = 0, seam = 0;
    for (int j = 0; j < grid.size(); ++j) {
        auto const cell = grid.unflatten(j);
        total += occ[j];
        int const n = grid.points[axis];
        int const d = centered_offset(cell[axis], center, n);
        weighted += occ[j] * (center + d);
        bool near = false;
        for (int ax = 0; ax < grid.dimension; ++ax) {
            int const na = grid.points[ax];
            int const da = centered_offset(cell[ax], ax == axis ? center : 0, na);
            if (na > 2 * seam_width && std::min(na / 2 - da, da + (na - 1) / 2) < seam_width)
                near = true;
        }
        if (near)
            seam += occ[j];
    }
    if (!(total > 0))
        throw Error("mean displacement of a kernel with zero trace");
    Displacement out;
    out.value = weighted / total;
    out.seam_occupancy = seam / total;
    out.seam_flag = out.seam_occupancy > seam_limit;
    return out;
}

} // namespace jumptime
