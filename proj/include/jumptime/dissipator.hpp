#pragma once
#include "jumptime/state.hpp"

#include <vector>

namespace jumptime {

enum class KickShape { Delta, Uniform, Gaussian, Table };

/**
 Momentum-transfer distribution G(q) of a kick family. Kicks are restricted to
 the momentum grid, so G is sampled there and renormalized to unit mass.
 Delta is the collective limit and Uniform the local (one operator per cell) limit.
 */
struct KickDistribution {
    KickShape shape = KickShape::Delta;
    double sigma = 1.0;        ///< Gaussian width in lattice constants
    std::vector<double> table; ///< Table values on the grid (flattened)

    static KickDistribution delta() { return {}; }
    static KickDistribution uniform() { return {KickShape::Uniform, 1.0, {}}; }
    static KickDistribution gaussian(double sigma) { return {KickShape::Gaussian, sigma, {}}; }
    static KickDistribution from_table(std::vector<double> values) {
        return {KickShape::Table, 1.0, std::move(values)};
    }

    /// Weights w_m = G(q_m) dq on the flattened grid, summing to 1.
    std::vector<double> weights(MomentumGrid const& grid) const;
    std::string label() const;
};

enum class ChannelKind { Collective, SublatticeProjector, Kick, DirectionalHop };

/**
 One jump-operator family with its rate.

   Collective{target}      1 (x) |target><other|
   SublatticeProjector{t}  1 (x) |t><t|
   Kick{G}                 exp(i q x) (x) |A><B|, q ~ G
   DirectionalHop{axis}    exp(-i k_axis) (x) 1, i.e. |j + e_axis><j|
 */
struct DissipatorComponent {
    ChannelKind kind = ChannelKind::Collective;
    Sublattice target = Sublattice::A;
    KickDistribution kick;
    int axis = 0;
    double rate = 1.0;

    /// Intracell factor of the jump operator.
    Mat2 intracell() const;
    /// L^dagger L, which is momentum independent for every family.
    Mat2 decay() const { return intracell().adjoint() * intracell(); }
    /// Scalar momentum factor multiplying the intracell part in block k.
    cplx momentum_phase(Momentum const& k) const;
    std::string label() const;
};

/// Rate-weighted collection of jump-operator families. The total rate is the sum
/// of component rates; a single family is a one-element list.
class DissipatorSpec {
public:
    static DissipatorSpec collective(Sublattice target = Sublattice::A, double rate = 1.0);
    static DissipatorSpec sublattice(Sublattice target, double rate = 1.0);
    static DissipatorSpec kick(KickDistribution g, double rate = 1.0);
    static DissipatorSpec directional_hop(double rate = 1.0, int axis = 0);
    /// Flattens nested mixtures; throws ValidationError for non-positive rates.
    static DissipatorSpec mixture(std::vector<DissipatorSpec> const& parts);

    std::vector<DissipatorComponent> const& components() const { return parts; }
    double total_rate() const;
    bool is_mixture() const { return parts.size() > 1; }
    /// Copy with every rate multiplied by `factor`.
    DissipatorSpec scaled(double factor) const;
    std::string label() const;

private:
    std::vector<DissipatorComponent> parts;
};

/// Per-momentum H_eff(k) = H(k) - (i/2) sum_j gamma_j L_j^dagger L_j.
struct EffectiveHamiltonianBlocks {
    MomentumGrid grid;
    std::vector<Mat2> blocks;
};

/// sum_j gamma_j L_j^dagger L_j (intracell, identical in every momentum block).
Mat2 decay_operator(DissipatorSpec const& dissipator);

EffectiveHamiltonianBlocks effective_hamiltonian(ModelSpec const& model, DissipatorSpec const& dissipator,
                                                 MomentumGrid const& grid);

struct DarkSetReport {
    bool dark_free = true;
    std::vector<Momentum> contacts;
    /// Jumps keep occurring inside the projected sublattice even at contacts.
    bool persistent_within_sublattice = false;
    /// Every grid momentum is a contact: the jumptime map empties after one step.
    bool trace_terminating = false;
};

/// Dark contacts: momenta where a common null vector of all intracell jump
/// factors is an eigenvector of H(k). For B->A families this is h_perp = 0.
DarkSetReport dark_set_report(ModelSpec const& model, DissipatorSpec const& dissipator,
                              MomentumGrid const& grid, std::optional<double> tolerance = std::nullopt);

struct ChannelRate {
    int component = 0;
    double rate = 0;
};

/// Unnormalized rates gamma_j <psi| L_j^dagger L_j |psi> per component.
/// Kick families report their total; q is drawn separately from G.
std::vector<ChannelRate> jump_channels(DissipatorSpec const& dissipator, PureState const& state);

/// L |psi> / ||L |psi>|| for the given component; `kick` is the flattened grid
/// offset of q (ignored for non-kick families). Throws Error on a zero result.
PureState apply_jump(DissipatorSpec const& dissipator, int component, int kick, PureState const& state);

} // namespace jumptime
