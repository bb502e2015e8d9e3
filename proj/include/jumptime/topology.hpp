#pragma once
#include "jumptime/propagators.hpp"

#include <functional>

namespace jumptime {

/// Rectangle-rule Brillouin-zone quadrature with grid doubling.
struct QuadratureOptions {
    int start_points = 0; ///< 0: 512 in 1D, 128 per axis in 2D
    int max_points = 0;   ///< 0: 2^14 in 1D, 512 per axis in 2D
    double tolerance = 1e-8;
};

struct ConvergenceStep {
    int points = 0;
    double value = 0;
};

struct Quadrature {
    double value = 0;
    int points = 0;
    bool converged = false;
    std::vector<ConvergenceStep> history;
};

/// Doubles `points` from the start value until successive results of
/// `integral(points)` differ by less than the tolerance, or the cap is reached.
Quadrature converge(std::function<double(int)> const& integral, int dimension, QuadratureOptions const& options = {});

struct WindingResult {
    double value = 0;
    long rounded = 0;
    double residue = 0;
    /// max - min over the p_j slices (2D only).
    double slice_spread = 0;
    Quadrature quadrature;
};

/// Winding of h about the z axis along `axis`; 2D results average over the
/// other momentum. Throws DomainError at dark contacts.
WindingResult winding_number(ModelSpec const& model, int axis = 0, QuadratureOptions const& options = {});

struct ConnectionValue {
    double value = 0;
    double imag = 0;            ///< vanishes by Hermiticity of the kernel
    std::optional<double> closed_form;
};

/// J(p) = i d/dp K(p, p2)|_{p2 = p} along `axis`, differentiated analytically.
/// For CC kernels of chiral models also returns the winding integrand and
/// throws ConsistencyError on disagreement beyond 1e-8.
ConnectionValue jumptime_connection(JumptimeKernel const& kernel, Momentum const& p, int axis);

struct PhaseResult {
    double value = 0;
    PropagatorKind kind = PropagatorKind::Empirical;
    std::string label;      ///< "closed_form" or "empirical"
    Quadrature quadrature;
    /// G-weighted double sum over p and q at the final grid (kick families).
    std::optional<double> kick_double_sum;
};

/// Brillouin-zone average of the jumptime connection along `axis`.
PhaseResult jumptime_phase(JumptimeKernel const& kernel, int axis = 0, QuadratureOptions const& options = {});

using KernelFunction = std::function<cplx(Momentum const&, Momentum const&)>;

/// Phase of an arbitrary kernel function, with no closed-form cross-check.
Quadrature kernel_phase(KernelFunction const& kernel, int dimension, int axis = 0,
                        QuadratureOptions const& options = {});

struct ResidualTerms {
    double r1 = 0;
    double r2 = 0;
    Quadrature quadrature;
};

/// Non-topological phase contributions for collective collapse at rate gamma.
ResidualTerms residual_terms(ModelSpec const& model, int axis = 0, double gamma = 1.0,
                             QuadratureOptions const& options = {});

struct CurvatureResult {
    Eigen::MatrixXd omega; ///< omega(m1, m2) on an n x n grid
    double chern = 0;
    int points = 0;
};

/// Curvature d1 J2 - d2 J1 by differences of the connection, and its BZ average.
CurvatureResult curvature_chern(JumptimeKernel const& kernel, int points = 64);

struct AxisReport {
    WindingResult winding;
    PhaseResult phase;
    std::optional<ResidualTerms> residuals; ///< collective-collapse kernels only
    /// |T - W - R1 - R2| (collective collapse) or NaN.
    double identity_defect = std::numeric_limits<double>::quiet_NaN();
};

struct TopologyReport {
    std::string model;
    std::string dissipator;
    int dimension = 1;
    std::vector<AxisReport> axes;
    std::optional<CurvatureResult> curvature;
    SymmetryReport symmetry;
};

/// Full report: windings, phases, residuals and (2D) curvature.
TopologyReport topology_report(ModelSpec const& model, DissipatorSpec const& dissipator,
                               QuadratureOptions const& options = {}, bool with_curvature = true);

struct PhaseTransform {
    std::array<double, 2> law{0, 0};        ///< T1 - m T2, T2
    std::array<double, 2> recomputed{0, 0}; ///< phases of the transformed model
    Eigen::Vector2d displacement_before = Eigen::Vector2d::Zero();
    Eigen::Vector2d displacement_after = Eigen::Vector2d::Zero();
    double max_deviation = 0;
};

/// Applies T1' = T1 - m T2, T2' = T2 and checks it against a recomputation on
/// the transformed model, plus invariance of T1 a1 + T2 a2. Throws
/// ConsistencyError beyond `tolerance`.
PhaseTransform transform_phases(std::array<double, 2> phases, ModelSpec const& model,
                                DissipatorSpec const& dissipator, int m, double tolerance = 1e-6,
                                QuadratureOptions const& options = {});

} // namespace jumptime
