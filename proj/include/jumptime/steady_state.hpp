#pragma once
#include "jumptime/reference_solvers.hpp"

namespace jumptime {

/**
 Walltime steady state of collective collapse at momentum p, as the intracell
 Bloch vector r with rho_in = (1 + r.sigma) / 2:
   r = (gamma / 2) / (h_perp^2 + gamma^2 / 8) (h_y, -h_x, gamma / 4).
 Only defined for h_z = 0 models (ValidationError otherwise).
 */
Eigen::Vector3d bloch_steady_state(ModelSpec const& model, double gamma, Momentum const& p);

/// Largest entry of the per-momentum 2x2 Lindblad right-hand side at Bloch vector r.
double lindblad_block_residual(ModelSpec const& model, double gamma, Momentum const& p, Eigen::Vector3d const& r);

/// Per-momentum intracell Bloch vectors of a dense state, each block normalized by its weight.
std::vector<Eigen::Vector3d> momentum_bloch_vectors(DenseMatrix const& rho, MomentumGrid const& grid);

/// Closed-form steady-state cross-section current of the SSH chain.
double ssh_steady_current(double v, double w, double gamma);

/// Same current from a Brillouin-zone sum of the steady Bloch vectors.
double steady_current_quadrature(double v, double w, double gamma, int points = 4096);

/// Distance in v/w between the 90% and 10% points of the current crossover.
double crossover_width(double gamma, double w = 1.0);

struct CrossoverRow {
    double v_over_w = 0;
    double gamma = 0;
    double current = 0;
    /// Jumptime step a T for collective collapse (NaN at the dark transition).
    double a_times_t = 0;
};

/// Steady current and jumptime step over a grid of v/w and gamma values (w = 1).
std::vector<CrossoverRow> crossover_sweep(std::vector<double> const& v_over_w, std::vector<double> const& gammas);

} // namespace jumptime
