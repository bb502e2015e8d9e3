#pragma once
#include "jumptime/bloch_model.hpp"

namespace jumptime {

using Amplitudes = Eigen::Matrix<cplx, Eigen::Dynamic, 2>;

/**
 Single-particle pure state in the momentum basis: row = flattened grid index,
 column = sublattice. The discrete basis is orthonormal with
 <j|k> = exp(i j.k) / sqrt(N), so position amplitudes follow by a DFT.
 */
struct PureState {
    MomentumGrid grid;
    Amplitudes amp;

    double norm() const { return amp.norm(); }
    void normalize();
    double population(Sublattice s) const { return amp.col(index(s)).squaredNorm(); }

    /// |j0> (x) intracell, with `intracell` normalized internally.
    static PureState localized(MomentumGrid const& grid, std::array<int, 2> cell, Vec2 intracell);

    /// Real-space amplitudes, row = cell index j1 + L1 * j2.
    Amplitudes to_position() const;
    static PureState from_position(MomentumGrid const& grid, Amplitudes const& position);

    /// Dense vector in the real-space basis 2 * cell + sublattice.
    Eigen::VectorXcd to_dense() const;
};

/// Centered coordinate of `cell` relative to `center` on a ring of n cells,
/// in the range (-n/2, n/2].
int centered_offset(int cell, int center, int n);

} // namespace jumptime
