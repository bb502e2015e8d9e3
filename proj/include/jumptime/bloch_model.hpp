#pragma once
#include "jumptime/core.hpp"

#include <optional>
#include <vector>

namespace jumptime {

/// Integer lattice translation in units of the primitive vectors. In 1D r[1] == 0.
using Translation = std::array<int, 2>;

/// Hopping block H_r = <j| H |j + r> between cell j and cell j + r.
struct Hopping {
    Translation r{0, 0};
    Mat2 matrix = Mat2::Zero();
};

/**
 Two-band lattice Hamiltonian given by a finite hopping set.

 The Bloch Hamiltonian is h(k) = sum_r H_r exp(i k.r), with k the dimensionless
 crystal momentum. Hoppings are stored merged and sorted by translation.
 */
class ModelSpec {
public:
    ModelSpec() = default;
    /// Throws ValidationError if the hopping set is not Hermitian
    /// (H_{-r} != H_r^dagger) or the dimension is not 1 or 2.
    ModelSpec(int dimension, std::vector<Hopping> hoppings, std::string name = "custom");

    int dimension() const { return dim; }
    std::vector<Hopping> const& hoppings() const { return terms; }
    std::string const& name() const { return label; }

    /// Primitive translation vectors in length units (a = 1 by default).
    std::array<Eigen::Vector2d, 2> const& primitive_vectors() const { return primitive; }
    void set_primitive_vectors(Eigen::Vector2d const& a1, Eigen::Vector2d const& a2);

    /// Largest |r_axis| over the hopping set.
    int hopping_range(int axis) const;
    /// Largest operator 2-norm over the hopping blocks (the energy scale).
    double energy_scale() const;

    /// Copy with `extra` hoppings merged in (validated again).
    ModelSpec plus(std::vector<Hopping> const& extra) const;

private:
    int dim = 1;
    std::vector<Hopping> terms;
    std::string label = "custom";
    std::array<Eigen::Vector2d, 2> primitive{Eigen::Vector2d{1.0, 0.0}, Eigen::Vector2d{0.0, 1.0}};
};

/// Pauli decomposition h(k) = h0 1 + hx sx + hy sy + hz sz at one momentum.
struct BlochVector {
    double h0 = 0, hx = 0, hy = 0, hz = 0;

    double h_perp_sq() const { return hx * hx + hy * hy; }
    double h_perp() const { return std::sqrt(h_perp_sq()); }
    Mat2 matrix() const;
};

/// Uniform Brillouin-zone grid: k_m = 2 pi m / n per axis, m = 0..n-1.
/// In 1D points[1] == 1. Flattened index = m1 + n1 * m2.
struct MomentumGrid {
    int dimension = 1;
    std::array<int, 2> points{1, 1};

    static MomentumGrid line(int n);
    static MomentumGrid square(int n1, int n2);
    static MomentumGrid for_model(ModelSpec const& model, int n_per_axis);

    int size() const { return points[0] * points[1]; }
    double spacing(int axis) const { return two_pi / points[axis]; }
    Momentum at(int flat) const;
    std::array<int, 2> unflatten(int flat) const { return {flat % points[0], flat / points[0]}; }
    int flatten(int m1, int m2) const;
    /// Index of -k for the grid point at `flat`.
    int negated(int flat) const;
};

struct SymmetryReport {
    bool chiral = false;
    bool pt = false;
    bool trs = false;
    bool inversion = false;
    bool residual_forced_zero = false;
};

struct PerpMinimum {
    double value = 0;
    Momentum argmin{0, 0};
    bool dark_contact = false;
};

namespace models {
/// h = (v + w cos k, -w sin k, 0).
ModelSpec ssh(double v, double w);
/// h = (u + v cos k1, v sin k1 + 2w sin k2, 2w cos k2).
ModelSpec torus2d(double u, double v, double w);
/// Single-band nearest-neighbour chain carried as h0 = 2J cos k on both sublattices.
ModelSpec directional_chain(double J);
} // namespace models

/// Throws ValidationError for non-Hermitian hopping sets; the returned vector
/// reassembles the Fourier sum exactly.
BlochVector bloch_vector(ModelSpec const& model, Momentum const& k);
Mat2 bloch_matrix(ModelSpec const& model, Momentum const& k);

/// Analytic derivative d h / d k_axis.
BlochVector bloch_derivative(ModelSpec const& model, Momentum const& k, int axis);

/// Default dark-contact tolerance: 1e-9 times the model energy scale.
double dark_tolerance(ModelSpec const& model);

/// Minimum of h_perp over the grid, refined by golden-section search along
/// each axis around the grid argmin.
PerpMinimum h_perp_min(ModelSpec const& model, MomentumGrid const& grid,
                       std::optional<double> tolerance = std::nullopt);

/// Dense periodic real-space Hamiltonian. Basis index = 2 * cell + sublattice,
/// cell = j1 + L1 * j2. Requires L >= 2 * hopping range on every axis.
Eigen::MatrixXcd real_space_hamiltonian(ModelSpec const& model, std::array<int, 2> cells);

SymmetryReport symmetry_check(ModelSpec const& model, MomentumGrid const& grid,
                              std::optional<double> tolerance = std::nullopt);

/// Re-expresses a 2D model in the primitive vectors a1' = a1, a2' = a2 + m a1.
/// A hopping r = (r1, r2) becomes (r1 - m r2, r2); h'(k1, k2) = h(k1, k2 - m k1).
ModelSpec transform_primitive_vectors(ModelSpec const& model, int m);

} // namespace jumptime
