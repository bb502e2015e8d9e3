#pragma once
#include "jumptime/dissipator.hpp"

#include <optional>

namespace jumptime {

using DenseMatrix = Eigen::MatrixXcd;

/// Jump operator with its rate in the dense real-space basis (2 * cell + sublattice).
struct DenseJump {
    double rate = 0;
    DenseMatrix op;
};

/**
 Dense real-space operators for a model and dissipator on a periodic lattice.
 Kick families expand into one operator exp(i q.x) (x) |A><B| per grid kick,
 with rate gamma * G(q) dq; Uniform G is then the local-collapse channel set.
 */
struct DenseSystem {
    MomentumGrid grid;
    DenseMatrix hamiltonian;
    DenseMatrix heff;
    std::vector<DenseJump> jumps;

    static DenseSystem build(ModelSpec const& model, DissipatorSpec const& dissipator, MomentumGrid const& grid);
    int dimension() const { return int(hamiltonian.rows()); }
    /// Lindblad right-hand side -i[H, rho] + sum_j gamma_j D[L_j] rho.
    DenseMatrix lindblad(DenseMatrix const& rho) const;
};

/// Unitary whose columns are the momentum states |k, s> in the real-space
/// basis: column 2 * flat(k) + s.
DenseMatrix momentum_basis(MomentumGrid const& grid);

/// |j0><j0| (x) |s><s| in the dense basis.
DenseMatrix localized_density(MomentumGrid const& grid, std::array<int, 2> cell, Sublattice s);

/// sum_j x_j rho(j, j) along `axis` with ring coordinates centered on `center`.
double dense_mean_position(DenseMatrix const& rho, MomentumGrid const& grid, int axis, int center = 0);

double trace_distance(DenseMatrix const& a, DenseMatrix const& b);

struct MasterResult {
    DenseMatrix rho;
    int accepted_steps = 0;
    int rejected_steps = 0;
};

/**
 Adaptive Dormand-Prince 5(4) integration of the Lindblad equation from 0 to t
 with mixed absolute/relative local tolerance `tol`. Throws IntegrationError
 when the step size underflows.
 */
MasterResult integrate_master(DenseMatrix const& rho0, DenseSystem const& system, double t, double tol = 1e-10);

struct JumptimeMapResult {
    DenseMatrix rho;
    double trace = 0;
    /// Condition number of the eigenvector matrix (Schur route: 1).
    double condition = 1;
    bool schur_fallback = false;
    /// Non-decaying modes dropped because every jump annihilates them.
    int dark_modes = 0;
};

/**
 One step of the jumptime map rho -> int_0^inf dtau sum_j gamma_j L_j
 exp(-i H_eff tau) rho exp(i H_eff^dagger tau) L_j^dagger, evaluated in the
 eigenbasis of H_eff: X_kl = -i rho_kl / (lambda_k - conj(lambda_l)).
 Ill-conditioned eigenbases fall back to a Bartels-Stewart solve of
 i H_eff X - i X H_eff^dagger = rho on the complex Schur form.
 Throws DarkDivergence when a non-decaying pair of modes feeds a jump channel.
 */
JumptimeMapResult jumptime_map(DenseMatrix const& rho, DenseSystem const& system, double max_condition = 1e8);

struct SteadyStateResult {
    DenseMatrix rho;
    double residual = 0;
    /// Dimension of the numerical null space of the Liouvillian.
    int null_dimension = 0;
    std::vector<double> smallest_singular_values;
};

/**
 Null vector of the vectorized Liouvillian (column-major vec), reshaped,
 Hermitized and trace-normalized. A degenerate null space (second singular
 value below `degeneracy_tol`) needs `rho0`: the result is then the spectral
 projection of rho0 onto the null space along the conserved quantities.
 Without rho0 it throws AmbiguityError.
 */
SteadyStateResult steady_state_numeric(DenseSystem const& system, std::optional<DenseMatrix> const& rho0 = std::nullopt,
                                       double degeneracy_tol = 1e-8);

} // namespace jumptime
