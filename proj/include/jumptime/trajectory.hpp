#pragma once
#include "jumptime/dissipator.hpp"
#include "jumptime/rng.hpp"

#include <functional>
#include <optional>

namespace jumptime {

/**
 Exact no-jump propagator exp(-i H_eff(k) tau) per momentum block, in closed
 form through the trace/traceless split H_eff = a 1 + b.sigma:
   exp(-i tau H) = exp(-i tau a) [cos(tau s) 1 - i tau sinc(tau s) (H - a 1)],  s^2 = b.b
 */
class NoJumpPropagator {
public:
    explicit NoJumpPropagator(EffectiveHamiltonianBlocks const& heff);

    Mat2 block(int k, double tau) const;
    void evolve(PureState& state, double tau) const;
    /// ||exp(-i H_eff tau) psi||^2.
    double survival(PureState const& state, double tau) const;
    int size() const { return int(shift.size()); }

private:
    std::vector<cplx> shift;     ///< a = tr(H)/2
    std::vector<Mat2> traceless; ///< H - a 1
    std::vector<cplx> s_squared; ///< b.b
};

/// Unnormalized exp(-i H_eff tau) |psi>. Throws ValidationError for tau < 0.
PureState evolve_nojump(PureState const& state, EffectiveHamiltonianBlocks const& heff, double tau);

/// tau with ||psi(tau)||^2 = u by bracket doubling from `initial_bracket` and
/// bisection to relative tolerance 1e-12 on the norm. Throws DarkTrapped when
/// the survival norm stays above u up to tau_max.
double sample_waiting_time(PureState const& state, NoJumpPropagator const& propagator, double u,
                           double initial_bracket, double tau_max);

struct Jump {
    int n = 0;
    double time = 0;
    int component = 0;
    int kick = 0;
};

/// Observables of one normalized trajectory state. Positions are in lattice
/// units, measured from `center` with the ring coordinate in (-L/2, L/2].
struct Observables {
    std::array<double, 2> x{0, 0};
    double pop_a = 0;
    double pop_b = 0;
    /// Occupation of cells within `seam_width` of the periodic seam.
    double seam = 0;
    std::vector<double> position; ///< per cell (flattened), both sublattices
    std::vector<double> momentum; ///< per grid momentum, both sublattices
};

struct JumpRecord {
    std::uint64_t base_seed = 0;
    std::uint64_t index = 0;
    std::vector<Jump> jumps;
    /// snapshots[n] is taken right after jump n (snapshots[0] is the initial state).
    std::vector<Observables> snapshots;
    bool trapped = false;
    std::string trap_message;
};

struct EngineOptions {
    /// Waiting-time search cap in units of 1 / (total rate).
    double tau_max_factor = 50.0;
    std::array<int, 2> center{0, 0};
    int seam_width = 2;
};

/// Names of the scalar observables in accumulator order.
inline constexpr std::array<char const*, 5> scalar_names{"x1", "x2", "pop_A", "pop_B", "seam"};

/// Welford running mean/variance with Chan's pairwise merge.
struct RunningStats {
    long count = 0;
    double mean = 0;
    double m2 = 0;

    void add(double x);
    void merge(RunningStats const& other);
    double variance() const { return count > 1 ? m2 / double(count - 1) : 0.0; }
    double std_err() const { return count > 1 ? std::sqrt(variance() / double(count)) : 0.0; }
};

struct SnapshotStats {
    std::array<RunningStats, scalar_names.size()> scalars;
    std::vector<RunningStats> position;
    std::vector<RunningStats> momentum;
    /// Sum over trajectories of |psi><psi| in the real-space basis (if recorded).
    Eigen::MatrixXcd density_sum;

    void add(Observables const& obs, Eigen::VectorXcd const* dense);
    void merge(SnapshotStats const& other);
};

/**
 Mergeable ensemble statistics, one slot per jump count (jumptime readout) or
 per time bin (walltime readout). density() divides by the number of launched
 trajectories, so trapped trajectories show up as a trace deficit.
 */
struct EnsembleAccumulator {
    std::vector<SnapshotStats> slots;
    std::vector<double> slot_labels;
    long trajectories = 0;
    long trapped = 0;

    void merge(EnsembleAccumulator const& other);
    Eigen::MatrixXcd density(int slot) const;
};

enum class Readout { Jumptime, Walltime };

struct EnsembleConfig {
    long trajectories = 700;
    int n_max = 4;
    std::uint64_t base_seed = 1;
    Readout readout = Readout::Jumptime;
    std::vector<double> times; ///< walltime sample times (1/gamma units), ascending
    bool record_density = false;
    int threads = 0;           ///< 0: JUMPTIME_THREADS or hardware concurrency
    int chunk = 16;            ///< trajectories per work item; fixes merge order
    EngineOptions engine;
};

class TrajectorySimulator {
public:
    TrajectorySimulator(ModelSpec model, DissipatorSpec dissipator, MomentumGrid grid,
                        EngineOptions options = {});

    using Observer = std::function<void(int slot, double time, PureState const&)>;

    /// Jumptime run: stops after n_max jumps or when trapped.
    JumpRecord run(PureState const& init, int n_max, std::uint64_t base_seed, std::uint64_t index,
                   Observer const& observer = {}) const;

    /// Walltime run: calls `observer(bin, t, state)` at each sample time.
    JumpRecord run_walltime(PureState const& init, std::vector<double> const& times,
                            std::uint64_t base_seed, std::uint64_t index, Observer const& observer) const;

    Observables observe(PureState const& state) const;

    MomentumGrid const& grid() const { return lattice; }
    DissipatorSpec const& dissipator() const { return channels; }
    NoJumpPropagator const& propagator() const { return nojump; }

private:
    Jump jump_once(PureState& state, Philox4x64& rng, double tau, double now, int n) const;
    double tau_max() const;

    ModelSpec hamiltonian;
    DissipatorSpec channels;
    MomentumGrid lattice;
    EngineOptions options;
    NoJumpPropagator nojump;
    std::vector<std::vector<double>> kick_cdf; ///< per component (empty unless kick)
};

/// Convenience wrapper building a simulator for a single run.
JumpRecord run_trajectory(PureState const& init, ModelSpec const& model, DissipatorSpec const& dissipator,
                          int n_max, std::uint64_t base_seed, std::uint64_t index = 0,
                          EngineOptions const& options = {});

/// Parallel map over trajectories with per-trajectory Philox streams and a
/// merge order fixed by trajectory index, so results do not depend on the
/// thread count. Throws DarkTrapped if every trajectory is trapped.
EnsembleAccumulator ensemble_average(ModelSpec const& model, DissipatorSpec const& dissipator,
                                     PureState const& init, EnsembleConfig const& config);

/// Thread count from JUMPTIME_THREADS, falling back to hardware concurrency.
int default_thread_count();

} // namespace jumptime
