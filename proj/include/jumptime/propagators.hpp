#pragma once
#include "jumptime/dissipator.hpp"
#include "jumptime/reference_solvers.hpp"

namespace jumptime {

/// Collective-collapse propagator for general h_z, valid in 1D and 2D.
/// Throws DomainError when h_perp is below the dark tolerance at p or p2.
cplx k_cc(ModelSpec const& model, Momentum const& p, Momentum const& p2, double gamma = 1.0);
/// d/dp_axis k_cc(p, p2) by the chain rule through h(p).
cplx k_cc_derivative(ModelSpec const& model, Momentum const& p, Momentum const& p2, int axis, double gamma = 1.0);
/// d/dp_axis k_sublattice(p, p2).
double k_sublattice_derivative(ModelSpec const& model, Momentum const& p, Momentum const& p2, int axis,
                               double gamma = 1.0);
/// Alias of k_cc for vector momenta, kept for symmetry with the 1D name.
cplx k_cc_2d(ModelSpec const& model, Momentum const& p, Momentum const& p2, double gamma = 1.0);

/// Sublattice-projector propagator (identical for A and B). Requires h_z = 0 at
/// both momenta (ValidationError otherwise) and no dark contact (DomainError).
double k_sublattice(ModelSpec const& model, Sublattice target, Momentum const& p, Momentum const& p2,
                    double gamma = 1.0);

/// (gamma_cc / gamma) k_cc + (gamma_B / gamma) k_B with gamma = gamma_cc + gamma_B.
cplx k_mixture(ModelSpec const& model, double gamma_cc, double gamma_b, Momentum const& p, Momentum const& p2);

enum class PropagatorKind { CC, CC2D, SublatticeA, SublatticeB, MixtureCCB, Empirical };

std::string to_string(PropagatorKind kind);

/**
 Scalar jumptime propagator of a model/dissipator pair with respect to an
 invariant intracell state (the carrier). Catalog pairs use the closed forms;
 anything else that admits a carrier is evaluated by solving the per-block
 jumptime integral numerically and labelled Empirical.

 components(p, p2)[j] is the contribution of dissipator component j before
 any kick shift, so a kick component acts as K_q(p, p2) = K_j(p - q, p2 - q).
 */
class JumptimeKernel {
public:
    JumptimeKernel(ModelSpec model, DissipatorSpec dissipator);

    PropagatorKind kind() const { return tag; }
    bool closed_form() const { return tag != PropagatorKind::Empirical; }
    Mat2 const& carrier() const { return intracell; }
    ModelSpec const& model() const { return hamiltonian; }
    DissipatorSpec const& dissipator() const { return channels; }

    std::vector<cplx> components(Momentum const& p, Momentum const& p2) const;
    /// Sum of the unshifted components.
    cplx operator()(Momentum const& p, Momentum const& p2) const;
    /// Numeric per-block evaluation, available for every kind (cross-check route).
    std::vector<cplx> numeric_components(Momentum const& p, Momentum const& p2) const;
    /// d/dp_axis K(p, p2) at p2 = p: closed form where one exists, otherwise numeric.
    cplx derivative(Momentum const& p, int axis) const;
    /// Same derivative from the differentiated per-block linear solve.
    cplx numeric_derivative(Momentum const& p, int axis) const;

private:
    ModelSpec hamiltonian;
    DissipatorSpec channels;
    PropagatorKind tag = PropagatorKind::Empirical;
    Mat2 intracell;
    Mat2 damping; ///< (i/2) sum_j gamma_j L_j^dagger L_j
};

/// Invariant intracell state of a dissipator, or ValidationError if the jump
/// families do not share one.
Mat2 invariant_carrier(ModelSpec const& model, DissipatorSpec const& dissipator);

/// Momentum-space density kernel rho(k, k2) relative to a carrier intracell
/// state. Trace normalization is the plain sum of the diagonal.
struct DensityKernel {
    MomentumGrid grid;
    Eigen::MatrixXcd rho;
    Mat2 carrier = ket_bra(Sublattice::A, Sublattice::A);

    /// |j0><j0| (x) carrier.
    static DensityKernel localized(MomentumGrid const& grid, std::array<int, 2> cell, Mat2 const& carrier);
    /// Homogeneous momentum diagonal with no coherences (1/N on the diagonal).
    static DensityKernel homogeneous(MomentumGrid const& grid, Mat2 const& carrier);

    double trace() const { return rho.trace().real(); }
    /// Full density matrix rho (x) carrier in the dense real-space basis.
    DenseMatrix to_dense() const;
    /// Projection of a dense state onto the carrier.
    static DensityKernel from_dense(DenseMatrix const& dense, MomentumGrid const& grid, Mat2 const& carrier);
    /// Real-space occupation per cell.
    std::vector<double> position_distribution() const;
};

/// Per-step kernel update: non-kick components multiply elementwise, kick
/// components convolve with G through cyclic grid shifts. Throws DomainError at
/// dark contacts on the grid.
DensityKernel evolve_kernel(DensityKernel const& rho, JumptimeKernel const& kernel, int steps);

struct Displacement {
    double value = 0;
    double seam_occupancy = 0;
    bool seam_flag = false;
};

/// Normalized mean position along `axis` with ring coordinates centered on
/// `center`; seam_flag is raised above `seam_limit` occupancy within
/// `seam_width` cells of the periodic seam.
Displacement mean_displacement(DensityKernel const& rho, int axis, int center = 0, int seam_width = 2,
                               double seam_limit = 1e-3);

} // namespace jumptime
