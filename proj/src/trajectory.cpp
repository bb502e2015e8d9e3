#include "jumptime/trajectory.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>

namespace jumptime {

namespace {

/// cos(z) and sin(z)/z from z^2, branch free.
void cos_sinc(cplx z2, cplx& c, cplx& sinc) {
    if (std::abs(z2) < 1e-6) {
        c = 1.0 - z2 / 2.0 + z2 * z2 / 24.0;
        sinc = 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
        return;
    }
    cplx const z = std::sqrt(z2);
    c = std::cos(z);
    sinc = std::sin(z) / z;
}

int seam_distance(int offset, int n) {
    // offsets lie in (-n/2, n/2]; the seam sits between n/2 and -n/2 + 1
    return std::min(n / 2 - offset, offset + (n - 1) / 2);
}

} // namespace

NoJumpPropagator::NoJumpPropagator(EffectiveHamiltonianBlocks const& heff) {
    for (auto const& h : heff.blocks) {
        cplx const a = 0.5 * h.trace();
        Mat2 const b = h - a * Mat2::Identity();
        shift.push_back(a);
        traceless.push_back(b);
        // b.b = -det(b) for a traceless 2x2 matrix
        s_squared.push_back(-b.determinant());
    }
}

Mat2 NoJumpPropagator::block(int k, double tau) const {
    cplx c, sinc;
    cos_sinc(tau * tau * s_squared[k], c, sinc);
    cplx const phase = std::exp(-I * tau * shift[k]);
    return phase * (c * Mat2::Identity() - (I * tau * sinc) * traceless[k]);
}

void NoJumpPropagator::evolve(PureState& state, double tau) const {
    for (int k = 0; k < size(); ++k)
        state.amp.row(k) = (block(k, tau) * state.amp.row(k).transpose()).transpose();
}

double NoJumpPropagator::survival(PureState const& state, double tau) const {
    double total = 0;
    for (int k = 0; k < size(); ++k)
        total += (block(k, tau) * state.amp.row(k).transpose()).squaredNorm();
    return total;
}

PureState evolve_nojump(PureState const& state, EffectiveHamiltonianBlocks const& heff, double tau) {
    if (tau < 0)
        throw ValidationError("no-jump evolution needs tau >= 0");
    NoJumpPropagator const prop(heff);
    PureState out = state;
    prop.evolve(out, tau);
    return out;
}

double sample_waiting_time(PureState const& state, NoJumpPropagator const& propagator, double u,
                           double initial_bracket, double tau_max) {
    if (!(u > 0 && u < 1))
        throw ValidationError("waiting-time threshold must lie in (0, 1)");

    double lo = 0, s_lo = propagator.survival(state, 0.0);
    double hi = std::min(initial_bracket, tau_max);
    double s_hi = propagator.survival(state, hi);
    while (s_hi > u) {
        if (hi >= tau_max)
            throw DarkTrapped("survival norm stays above the drawn threshold up to tau_max");
        lo = hi;
        s_lo = s_hi;
        hi = std::min(2 * hi, tau_max);
        s_hi = propagator.survival(state, hi);
        if (s_hi > s_lo * (1 + 1e-12) + 1e-15)
            throw Error("survival norm increased during bracketing");
    }

    for (int it = 0; it < 400; ++it) {
        double const mid = 0.5 * (lo + hi);
        double const s_mid = propagator.survival(state, mid);
        if (s_mid > s_lo * (1 + 1e-12) + 1e-15 || s_mid < s_hi * (1 - 1e-12) - 1e-15)
            throw Error("survival norm is not monotone in tau");
        if (std::abs(s_mid - u) <= 1e-12 * u || hi - lo <= 1e-15 * hi)
            return mid;
        if (s_mid > u) {
            lo = mid;
            s_lo = s_mid;
        } else {
            hi = mid;
            s_hi = s_mid;
        }
    }
    return 0.5 * (lo + hi);
}

void RunningStats::add(double x) {
    ++count;
    double const delta = x - mean;
    mean += delta / double(count);
    m2 += delta * (x - mean);
}

void RunningStats::merge(RunningStats const& other) {
    if (other.count == 0)
        return;
    if (count == 0) {
        *this = other;
        return;
    }
    long const n = count + other.count;
    double const delta = other.mean - mean;
    mean += delta * double(other.count) / double(n);
    m2 += other.m2 + delta * delta * double(count) * double(other.count) / double(n);
    count = n;
}

void SnapshotStats::add(Observables const& obs, Eigen::VectorXcd const* dense) {
    std::array<double, scalar_names.size()> const values{obs.x[0], obs.x[1], obs.pop_a, obs.pop_b, obs.seam};
    for (std::size_t i = 0; i < values.size(); ++i)
        scalars[i].add(values[i]);
    position.resize(obs.position.size());
    for (std::size_t i = 0; i < obs.position.size(); ++i)
        position[i].add(obs.position[i]);
    momentum.resize(obs.momentum.size());
    for (std::size_t i = 0; i < obs.momentum.size(); ++i)
        momentum[i].add(obs.momentum[i]);
    if (dense) {
        if (density_sum.size() == 0)
            density_sum = Eigen::MatrixXcd::Zero(dense->size(), dense->size());
        density_sum.noalias() += (*dense) * dense->adjoint();
    }
}

void SnapshotStats::merge(SnapshotStats const& other) {
    for (std::size_t i = 0; i < scalars.size(); ++i)
        scalars[i].merge(other.scalars[i]);
    auto merge_vec = [](std::vector<RunningStats>& a, std::vector<RunningStats> const& b) {
        if (a.size() < b.size())
            a.resize(b.size());
        for (std::size_t i = 0; i < b.size(); ++i)
            a[i].merge(b[i]);
    };
    merge_vec(position, other.position);
    merge_vec(momentum, other.momentum);
    if (other.density_sum.size() > 0) {
        if (density_sum.size() == 0)
            density_sum = other.density_sum;
        else
            density_sum += other.density_sum;
    }
}

void EnsembleAccumulator::merge(EnsembleAccumulator const& other) {
    if (slots.size() < other.slots.size())
        slots.resize(other.slots.size());
    if (slot_labels.size() < other.slot_labels.size())
        slot_labels = other.slot_labels;
    for (std::size_t i = 0; i < other.slots.size(); ++i)
        slots[i].merge(other.slots[i]);
    trajectories += other.trajectories;
    trapped += other.trapped;
}

Eigen::MatrixXcd EnsembleAccumulator::density(int slot) const {
    auto const& sum = slots.at(slot).density_sum;
    if (sum.size() == 0 || trajectories == 0)
        throw Error("density matrices were not recorded for this ensemble");
    return sum / double(trajectories);
}

TrajectorySimulator::TrajectorySimulator(ModelSpec model, DissipatorSpec dissipator, MomentumGrid grid,
                                         EngineOptions opts)
    : hamiltonian(std::move(model)), channels(std::move(dissipator)), lattice(grid), options(opts),
      nojump(effective_hamiltonian(hamiltonian, channels, lattice)) {
    if (lattice.dimension != hamiltonian.dimension())
        throw ValidationError("grid dimension does not match the model");
    for (auto const& c : channels.components()) {
        std::vector<double> cdf;
        if (c.kind == ChannelKind::Kick) {
            auto const w = c.kick.weights(lattice);
            double acc = 0;
            for (double x : w)
                cdf.push_back(acc += x);
        }
        kick_cdf.push_back(std::move(cdf));
    }
}

double TrajectorySimulator::tau_max() const {
    return options.tau_max_factor / channels.total_rate();
}

Observables TrajectorySimulator::observe(PureState const& state) const {
    Observables obs;
    obs.pop_a = state.population(Sublattice::A);
    obs.pop_b = state.population(Sublattice::B);

    obs.momentum.resize(lattice.size());
    for (int k = 0; k < lattice.size(); ++k)
        obs.momentum[k] = state.amp.row(k).squaredNorm();

    Amplitudes const pos = state.to_position();
    obs.position.resize(lattice.size());
    for (int j = 0; j < lattice.size(); ++j) {
        double const p = pos.row(j).squaredNorm();
        obs.position[j] = p;
        auto const cell = lattice.unflatten(j);
        bool near_seam = false;
        for (int axis = 0; axis < lattice.dimension; ++axis) {
            int const n = lattice.points[axis];
            int const d = centered_offset(cell[axis], options.center[axis], n);
            obs.x[axis] += p * (options.center[axis] + d);
            if (n > 2 * options.seam_width && seam_distance(d, n) < options.seam_width)
                near_seam = true;
        }
        if (near_seam)
            obs.seam += p;
    }
    return obs;
}

Jump TrajectorySimulator::jump_once(PureState& state, Philox4x64& rng, double tau, double now, int n) const {
    nojump.evolve(state, tau);
    state.normalize();

    auto const rates = jump_channels(channels, state);
    double total = 0;
    for (auto const& r : rates)
        total += r.rate;
    double target = rng.uniform() * total;
    int chosen = rates.back().component;
    for (auto const& r : rates) {
        if (r.rate > 0 && target < r.rate) {
            chosen = r.component;
            break;
        }
        target -= r.rate;
    }

    int kick = 0;
    auto const& cdf = kick_cdf[chosen];
    if (!cdf.empty()) {
        double const u = rng.uniform() * cdf.back();
        kick = int(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        kick = std::min(kick, int(cdf.size()) - 1);
    }

    state = apply_jump(channels, chosen, kick, state);
    return {n, now + tau, chosen, kick};
}

JumpRecord TrajectorySimulator::run(PureState const& init, int n_max, std::uint64_t base_seed,
                                    std::uint64_t index, Observer const& observer) const {
    JumpRecord record{base_seed, index, {}, {}, false, {}};
    Philox4x64 rng(base_seed, index);
    PureState state = init;
    state.normalize();

    record.snapshots.push_back(observe(state));
    if (observer)
        observer(0, 0.0, state);

    double now = 0;
    double const first_bracket = 1.0 / channels.total_rate();
    for (int n = 1; n <= n_max; ++n) {
        double tau;
        try {
            tau = sample_waiting_time(state, nojump, rng.uniform(), first_bracket, tau_max());
        } catch (DarkTrapped const& e) {
            record.trapped = true;
            record.trap_message = e.what();
            break;
        }
        auto const jump = jump_once(state, rng, tau, now, n);
        now = jump.time;
        record.jumps.push_back(jump);
        record.snapshots.push_back(observe(state));
        if (observer)
            observer(n, now, state);
    }
    return record;
}

JumpRecord TrajectorySimulator::run_walltime(PureState const& init, std::vector<double> const& times,
                                             std::uint64_t base_seed, std::uint64_t index,
                                             Observer const& observer) const {
    if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0))
        throw ValidationError("walltime sample times must be nonnegative and ascending");

    JumpRecord record{base_seed, index, {}, {}, false, {}};
    Philox4x64 rng(base_seed, index);
    PureState state = init;
    state.normalize();

    double now = 0;
    std::size_t bin = 0;
    double const first_bracket = 1.0 / channels.total_rate();
    int n = 0;
    while (bin < times.size()) {
        double const u = rng.uniform();
        double const horizon = times.back() - now;
        double tau = std::numeric_limits<double>::infinity();
        if (nojump.survival(state, horizon) <= u)
            tau = sample_waiting_time(state, nojump, u, std::min(first_bracket, horizon), horizon);

        while (bin < times.size() && times[bin] <= now + tau) {
            PureState snap = state;
            nojump.evolve(snap, times[bin] - now);
            snap.normalize();
            record.snapshots.push_back(observe(snap));
            if (observer)
                observer(int(bin), times[bin], snap);
            ++bin;
        }
        if (!std::isfinite(tau))
            break;
        auto const jump = jump_once(state, rng, tau, now, ++n);
        now = jump.time;
        record.jumps.push_back(jump);
    }
    return record;
}

JumpRecord run_trajectory(PureState const& init, ModelSpec const& model, DissipatorSpec const& dissipator,
                          int n_max, std::uint64_t base_seed, std::uint64_t index, EngineOptions const& options) {
    TrajectorySimulator const sim(model, dissipator, init.grid, options);
    return sim.run(init, n_max, base_seed, index);
}

int default_thread_count() {
    if (char const* env = std::getenv("JUMPTIME_THREADS")) {
        int const n = std::atoi(env);
        if (n > 0)
            return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

EnsembleAccumulator ensemble_average(ModelSpec const& model, DissipatorSpec const& dissipator,
                                     PureState const& init, EnsembleConfig const& config) {
    if (config.trajectories < 1)
        throw ValidationError("ensemble needs at least one trajectory");
    if (config.chunk < 1)
        throw ValidationError("chunk size must be positive");

    TrajectorySimulator const sim(model, dissipator, init.grid, config.engine);
    bool const walltime = config.readout == Readout::Walltime;
    int const n_slots = walltime ? int(config.times.size()) : config.n_max + 1;

    long const n_chunks = (config.trajectories + config.chunk - 1) / config.chunk;
    std::vector<EnsembleAccumulator> partial(n_chunks);

    auto work = [&](long chunk) {
        EnsembleAccumulator acc;
        acc.slots.resize(n_slots);
        long const first = chunk * config.chunk;
        long const last = std::min(config.trajectories, first + config.chunk);
        for (long t = first; t < last; ++t) {
            auto observer = [&](int slot, double, PureState const& s) {
                Eigen::VectorXcd dense;
                if (config.record_density)
                    dense = s.to_dense();
                acc.slots[slot].add(sim.observe(s), config.record_density ? &dense : nullptr);
            };
            auto const record = walltime
                                    ? sim.run_walltime(init, config.times, config.base_seed, std::uint64_t(t), observer)
                                    : sim.run(init, config.n_max, config.base_seed, std::uint64_t(t), observer);
            ++acc.trajectories;
            if (record.trapped)
                ++acc.trapped;
        }
        partial[chunk] = std::move(acc);
    };

    int const threads = std::max(1, std::min<int>(config.threads > 0 ? config.threads : default_thread_count(),
                                                   int(n_chunks)));
    if (threads == 1) {
        for (long c = 0; c < n_chunks; ++c)
            work(c);
    } else {
        std::atomic<long> next{0};
        std::vector<std::exception_ptr> failures(threads);
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i)
            pool.emplace_back([&, i] {
                try {
                    for (long c; (c = next.fetch_add(1)) < n_chunks;)
                        work(c);
                } catch (...) {
                    failures[i] = std::current_exception();
                    next = n_chunks;
                }
            });
        for (auto& th : pool)
            th.join();
        for (auto const& f : failures)
            if (f)
                std::rethrow_exception(f);
    }

    EnsembleAccumulator total;
    total.slots.resize(n_slots);
    for (auto const& p : partial)
        total.merge(p);
    if (walltime)
        total.slot_labels = config.times;
    else
        for (int n = 0; n < n_slots; ++n)
            total.slot_labels.push_back(n);

    if (total.trapped == total.trajectories)
        throw DarkTrapped("every trajectory ended in a dark state");
    return total;
}

} // namespace jumptime
