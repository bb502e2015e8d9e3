#include "jumptime/reference_solvers.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <functional>

namespace jumptime {

namespace {

std::array<int, 2> cell_of(MomentumGrid const& grid, int flat) { return grid.unflatten(flat); }

DenseMatrix intracell_lift(MomentumGrid const& grid, Mat2 const& m, std::function<cplx(int)> const& cell_phase) {
    int const n = grid.size();
    DenseMatrix op = DenseMatrix::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j)
        op.block<2, 2>(2 * j, 2 * j) = cell_phase(j) * m;
    return op;
}

DenseMatrix hop_operator(MomentumGrid const& grid, int axis) {
    int const n = grid.size();
    DenseMatrix op = DenseMatrix::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        auto c = cell_of(grid, j);
        c[axis] += 1;
        int const to = grid.flatten(c[0], c[1]);
        op.block<2, 2>(2 * to, 2 * j) = Mat2::Identity();
    }
    return op;
}

} // namespace

DenseSystem DenseSystem::build(ModelSpec const& model, DissipatorSpec const& dissipator, MomentumGrid const& grid) {
    if (grid.dimension != model.dimension())
        throw ValidationError("grid dimension does not match the model");
    DenseSystem sys;
    sys.grid = grid;
    sys.hamiltonian = real_space_hamiltonian(model, grid.points);

    for (auto const& c : dissipator.components()) {
        switch (c.kind) {
        case ChannelKind::Collective:
        case ChannelKind::SublatticeProjector:
            sys.jumps.push_back({c.rate, intracell_lift(grid, c.intracell(), [](int) { return cplx{1.0}; })});
            break;
        case ChannelKind::Kick: {
            auto const w = c.kick.weights(grid);
            for (int q = 0; q < grid.size(); ++q) {
                if (w[q] == 0)
                    continue;
                auto const [q1, q2] = grid.unflatten(q);
                auto phase = [&](int j) {
                    auto const cell = cell_of(grid, j);
                    double const arg = two_pi * (double(q1) * cell[0] / grid.points[0] +
                                                 double(q2) * cell[1] / grid.points[1]);
                    return std::polar(1.0, arg);
                };
                sys.jumps.push_back({c.rate * w[q], intracell_lift(grid, c.intracell(), phase)});
            }
            break;
        }
        case ChannelKind::DirectionalHop:
            sys.jumps.push_back({c.rate, hop_operator(grid, c.axis)});
            break;
        }
    }

    sys.heff = sys.hamiltonian;
    for (auto const& j : sys.jumps)
        sys.heff -= (0.5 * I * j.rate) * (j.op.adjoint() * j.op);
    return sys;
}

DenseMatrix DenseSystem::lindblad(DenseMatrix const& rho) const {
    DenseMatrix out = -I * (heff * rho - rho * heff.adjoint());
    for (auto const& j : jumps)
        out.noalias() += j.rate * (j.op * rho * j.op.adjoint());
    return out;
}

DenseMatrix momentum_basis(MomentumGrid const& grid) {
    int const n = grid.size();
    DenseMatrix u = DenseMatrix::Zero(2 * n, 2 * n);
    double const norm = 1.0 / std::sqrt(double(n));
    for (int k = 0; k < n; ++k) {
        auto const [m1, m2] = grid.unflatten(k);
        for (int j = 0; j < n; ++j) {
            auto const c = cell_of(grid, j);
            double const arg = two_pi * (double(m1) * c[0] / grid.points[0] + double(m2) * c[1] / grid.points[1]);
            cplx const v = norm * std::polar(1.0, arg);
            u(2 * j, 2 * k) = v;
            u(2 * j + 1, 2 * k + 1) = v;
        }
    }
    return u;
}

DenseMatrix localized_density(MomentumGrid const& grid, std::array<int, 2> cell, Sublattice s) {
    int const n = grid.size();
    DenseMatrix rho = DenseMatrix::Zero(2 * n, 2 * n);
    int const j = grid.flatten(cell[0], cell[1]);
    rho(2 * j + index(s), 2 * j + index(s)) = 1.0;
    return rho;
}

double dense_mean_position(DenseMatrix const& rho, MomentumGrid const& grid, int axis, int center) {
    double total = 0, weighted = 0;
    for (int j = 0; j < grid.size(); ++j) {
        double const p = rho(2 * j, 2 * j).real() + rho(2 * j + 1, 2 * j + 1).real();
        int const x = center + centered_offset(cell_of(grid, j)[axis], center, grid.points[axis]);
        total += p;
        weighted += p * x;
    }
    if (!(total > 0))
        throw Error("mean position of a state with zero trace");
    return weighted / total;
}

double trace_distance(DenseMatrix const& a, DenseMatrix const& b) {
    DenseMatrix d = a - b;
    d = 0.5 * (d + d.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(d, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

MasterResult integrate_master(DenseMatrix const& rho0, DenseSystem const& system, double t, double tol) {
    if (t < 0)
        throw ValidationError("integration time must be nonnegative");
    if (!(tol > 0))
        throw ValidationError("integration tolerance must be positive");

    // Dormand-Prince 5(4) tableau
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    MasterResult result{rho0, 0, 0};
    if (t == 0)
        return result;

    DenseMatrix& y = result.rho;
    double const scale = std::max(1.0, system.heff.cwiseAbs().rowwise().sum().maxCoeff());
    double h = std::min(t, 0.05 / scale);
    double now = 0;
    DenseMatrix k1 = system.lindblad(y);
    while (now < t) {
        if (now + h > t)
            h = t - now;
        if (h < 1e-14 * std::max(1.0, t))
            throw IntegrationError("master-equation step size underflow at t = " + std::to_string(now));

        DenseMatrix const k2 = system.lindblad(y + h * (a21 * k1));
        DenseMatrix const k3 = system.lindblad(y + h * (a31 * k1 + a32 * k2));
        DenseMatrix const k4 = system.lindblad(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        DenseMatrix const k5 = system.lindblad(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        DenseMatrix const k6 = system.lindblad(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        DenseMatrix const next = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        DenseMatrix const k7 = system.lindblad(next);
        DenseMatrix const err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err_norm = 0;
        for (Eigen::Index i = 0; i < err.size(); ++i) {
            double const sc = tol + tol * std::max(std::abs(y(i)), std::abs(next(i)));
            err_norm = std::max(err_norm, std::abs(err(i)) / sc);
        }

        if (err_norm <= 1.0) {
            now += h;
            y = next;
            k1 = k7;
            ++result.accepted_steps;
        } else {
            ++result.rejected_steps;
        }
        double const factor = err_norm > 0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
    }
    return result;
}

namespace {

/// Solves i A X - i X A^dagger = rho through the complex Schur form of A.
DenseMatrix schur_integral(DenseMatrix const& a, DenseMatrix const& rho, double dark_tol) {
    Eigen::ComplexSchur<DenseMatrix> schur(a);
    DenseMatrix const& q = schur.matrixU();
    DenseMatrix const& t = schur.matrixT();
    DenseMatrix const c = -I * (q.adjoint() * rho * q);
    int const n = int(a.rows());
    DenseMatrix y = DenseMatrix::Zero(n, n);
    for (int j = n - 1; j >= 0; --j) {
        Eigen::VectorXcd rhs = c.col(j);
        for (int l = j + 1; l < n; ++l)
            rhs += std::conj(t(j, l)) * y.col(l);
        DenseMatrix shifted = t;
        shifted.diagonal().array() -= std::conj(t(j, j));
        for (int k = 0; k < n; ++k)
            if (std::abs(shifted(k, k)) < dark_tol)
                throw DarkDivergence("jumptime integral diverges: non-decaying mode pair in the Schur form");
        y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
    }
    return q * y * q.adjoint();
}

} // namespace

JumptimeMapResult jumptime_map(DenseMatrix const& rho, DenseSystem const& system, double max_condition) {
    DenseMatrix const& a = system.heff;
    int const n = int(a.rows());
    if (rho.rows() != n || rho.cols() != n)
        throw ValidationError("density matrix does not match the system size");
    double const scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    double const dark_tol = 1e-9 * scale;

    JumptimeMapResult result;
    DenseMatrix x;

    Eigen::ComplexEigenSolver<DenseMatrix> es(a);
    if (es.info() != Eigen::Success)
        throw Error("eigendecomposition of H_eff failed");
    DenseMatrix const& v = es.eigenvectors();
    Eigen::JacobiSVD<DenseMatrix> svd(v);
    auto const& sv = svd.singularValues();
    result.condition = sv(n - 1) > 0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();

    if (result.condition <= max_condition) {
        auto const& lambda = es.eigenvalues();
        DenseMatrix const vinv = v.partialPivLu().inverse();
        DenseMatrix xt = vinv * rho * vinv.adjoint();

        // modes annihilated by every jump operator cannot feed the next step
        std::vector<bool> silent(n, true);
        for (int k = 0; k < n; ++k)
            for (auto const& j : system.jumps)
                if ((j.op * v.col(k)).norm() > 1e-9 * v.col(k).norm())
                    silent[k] = false;

        double const rho_scale = std::max(1e-300, xt.cwiseAbs().maxCoeff());
        for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) {
                cplx const denom = lambda(k) - std::conj(lambda(l));
                if (-denom.imag() > dark_tol) {
                    xt(k, l) *= -I / denom;
                    continue;
                }
                if (silent[k] || silent[l] || std::abs(xt(k, l)) < 1e-14 * rho_scale) {
                    if (k == l && std::abs(xt(k, l)) >= 1e-14 * rho_scale)
                        ++result.dark_modes;
                    xt(k, l) = 0;
                    continue;
                }
                throw DarkDivergence("jumptime integral diverges: a non-decaying mode feeds a jump channel");
            }
        }
        x = v * xt * v.adjoint();
    } else {
        result.schur_fallback = true;
        result.condition = 1;
        x = schur_integral(a, rho, dark_tol);
    }

    DenseMatrix out = DenseMatrix::Zero(n, n);
    for (auto const& j : system.jumps)
        out.noalias() += j.rate * (j.op * x * j.op.adjoint());
    result.rho = 0.5 * (out + out.adjoint());
    result.trace = result.rho.trace().real();
    return result;
}

SteadyStateResult steady_state_numeric(DenseSystem const& system, std::optional<DenseMatrix> const& rho0,
                                       double degeneracy_tol) {
    int const n = system.dimension();
    int const n2 = n * n;
    DenseMatrix const id = DenseMatrix::Identity(n, n);

    // column-major vec: vec(A X B) = (B^T (x) A) vec(X)
    auto kron = [](DenseMatrix const& a, DenseMatrix const& b) {
        DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j)
                out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        return out;
    };
    DenseMatrix super = -I * kron(id, system.heff) + I * kron(system.heff.conjugate(), id);
    for (auto const& j : system.jumps)
        super += j.rate * kron(j.op.conjugate(), j.op);

    Eigen::BDCSVD<DenseMatrix> svd(super, Eigen::ComputeFullU | Eigen::ComputeFullV);
    auto const& sv = svd.singularValues();
    double const threshold = degeneracy_tol * std::max(1.0, sv(0));

    SteadyStateResult result;
    int null_dim = 0;
    for (int i = n2 - 1; i >= 0 && sv(i) < threshold; --i)
        ++null_dim;
    result.null_dimension = std::max(1, null_dim);
    for (int i = n2 - 1; i >= std::max(0, n2 - 4); --i)
        result.smallest_singular_values.push_back(sv(i));

    Eigen::VectorXcd vec;
    if (result.null_dimension == 1) {
        vec = svd.matrixV().col(n2 - 1);
    } else {
        if (!rho0)
            throw AmbiguityError("degenerate steady-state manifold of dimension " +
                                 std::to_string(result.null_dimension) +
                                 "; singular values " + std::to_string(sv(n2 - 1)) + ", " +
                                 std::to_string(sv(n2 - 2)) + " (supply an initial state)");
        if (rho0->rows() != n || rho0->cols() != n)
            throw ValidationError("initial state does not match the system size");
        int const d = result.null_dimension;
        DenseMatrix const right = svd.matrixV().rightCols(d);
        DenseMatrix const left = svd.matrixU().rightCols(d);
        Eigen::Map<Eigen::VectorXcd const> v0(rho0->data(), n2);
        vec = right * (left.adjoint() * right).partialPivLu().solve(left.adjoint() * v0);
    }

    DenseMatrix rho = Eigen::Map<DenseMatrix>(vec.data(), n, n);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    cplx const tr = rho.trace();
    if (std::abs(tr) < 1e-14)
        throw Error("steady-state null vector is traceless");
    rho /= tr;
    result.rho = rho;
    Eigen::Map<Eigen::VectorXcd const> flat(result.rho.data(), n2);
    result.residual = (super * flat).norm();
    return result;
}

} // namespace jumptime
