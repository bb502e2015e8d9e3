#include "jumptime/verification.hpp"
#include "jumptime/experiments.hpp"
#include "jumptime/propagators.hpp"
#include "jumptime/reference_solvers.hpp"
#include "jumptime/steady_state.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace jumptime {

namespace {

std::string sci(double x) {
    std::ostringstream out;
    out << std::setprecision(3) << std::scientific << x;
    return out.str();
}

template <class F>
CheckResult timed(int id, std::string name, F&& body) {
    CheckResult r{id, std::move(name), false, "", 0};
    auto const start = std::chrono::steady_clock::now();
    try {
        body(r);
    } catch (std::exception const& e) {
        r.passed = false;
        r.detail += (r.detail.empty() ? "" : "; ") + std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

cplx random_complex(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return scale * cplx(u(rng), u(rng));
}

std::vector<Hopping> diagonal_terms(std::mt19937_64& rng, int range, bool real_only) {
    // h0 and h_z Fourier coefficients c_{-r} = conj(c_r) on the diagonal
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    std::vector<Hopping> out;
    for (int r = 0; r <= range; ++r) {
        cplx const z = r == 0 ? cplx(u(rng), 0) : (real_only ? cplx(u(rng), 0) : cplx(u(rng), u(rng)));
        cplx const e = r == 0 ? cplx(u(rng), 0) : (real_only ? cplx(u(rng), 0) : cplx(u(rng), u(rng)));
        Mat2 m = e * Mat2::Identity() + z * pauli::z();
        out.push_back({{r, 0}, m});
        if (r != 0)
            out.push_back({{-r, 0}, m.adjoint()});
    }
    return out;
}

QuadratureOptions fine() { return {}; }

double phase(ModelSpec const& model, DissipatorSpec const& d, int axis = 0) {
    return jumptime_phase(JumptimeKernel(model, d), axis, fine()).value;
}

} // namespace

namespace fixtures {

ModelSpec chiral_model(int dimension, std::vector<std::pair<Translation, cplx>> const& ab_terms, std::string name) {
    auto const ab = ket_bra(Sublattice::A, Sublattice::B);
    std::vector<Hopping> hoppings;
    for (auto const& [r, a] : ab_terms) {
        hoppings.push_back({r, a * ab});
        hoppings.push_back({{-r[0], -r[1]}, std::conj(a) * ab.adjoint()});
    }
    return ModelSpec(dimension, std::move(hoppings), std::move(name));
}

ModelSpec random_chiral(std::mt19937_64& rng, int range) {
    std::uniform_int_distribution<int> pick(-range, range);
    std::uniform_real_distribution<double> angle(0, two_pi);
    int const dominant = pick(rng);
    std::vector<std::pair<Translation, cplx>> terms;
    for (int r = -range; r <= range; ++r) {
        // 2 range weaker terms of modulus <= 0.8 / (2 range) keep h_perp >= 0.2
        cplx const a = r == dominant ? std::polar(1.0, angle(rng))
                                     : random_complex(rng, 0.8 / (2 * range) / std::sqrt(2.0));
        terms.push_back({{r, 0}, a});
    }
    return chiral_model(1, terms, "random_chiral");
}

ModelSpec random_with_hz(std::mt19937_64& rng, int range) {
    return random_chiral(rng, range).plus(diagonal_terms(rng, range, false));
}

ModelSpec random_trs(std::mt19937_64& rng, int range) {
    std::uniform_int_distribution<int> pick(-range, range);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int const dominant = pick(rng);
    std::vector<std::pair<Translation, cplx>> terms;
    for (int r = -range; r <= range; ++r)
        terms.push_back({{r, 0}, r == dominant ? (u(rng) > 0 ? 1.0 : -1.0) : 0.4 / (2 * range) * u(rng)});
    return chiral_model(1, terms, "random_trs").plus(diagonal_terms(rng, range, true));
}

std::vector<ModelSpec> inversion_only() {
    // h_z = eps sin k: odd h_z breaks time reversal but keeps inversion
    auto odd_z = [](double eps, int r) {
        Mat2 const m = (eps / (2.0 * I)) * pauli::z();
        return std::vector<Hopping>{{{r, 0}, m}, {{-r, 0}, m.adjoint()}};
    };
    return {models::ssh(0.4, 0.9).plus(odd_z(0.3, 1)), models::ssh(0.9, 0.4).plus(odd_z(0.5, 1)),
            models::ssh(0.3, 1.0).plus(odd_z(0.4, 2))};
}

} // namespace fixtures

CheckResult check_fig2(VerifyOptions const& options) {
    return timed(1, "fig2 transport", [&](CheckResult& r) {
        auto const start = std::chrono::steady_clock::now();
        auto const runs = run_fig2(700, 4, 64, options.base_seed);
        double const seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        auto const a = assess_fig2(runs);
        r.passed = a.transport_ok && seconds <= 60.0;
        r.detail = a.detail + ", runtime " + sci(seconds) + " s";
    });
}

CheckResult check_oracle_chain(VerifyOptions const& options) {
    return timed(2, "oracle chain", [&](CheckResult& r) {
        auto const model = models::ssh(0.2, 0.5);
        auto const diss = DissipatorSpec::collective();
        auto const grid = MomentumGrid::line(16);
        auto const system = DenseSystem::build(model, diss, grid);
        JumptimeKernel const kernel(model, diss);

        long const n_traj = 20000;
        EnsembleConfig cfg;
        cfg.trajectories = n_traj;
        cfg.n_max = 2;
        cfg.base_seed = options.base_seed;
        cfg.record_density = true;
        auto const init = PureState::localized(grid, {0, 0}, Vec2(1, 0));
        auto const acc = ensemble_average(model, diss, init, cfg);

        DenseMatrix rho = localized_density(grid, {0, 0}, Sublattice::A);
        auto rk = DensityKernel::localized(grid, {0, 0}, kernel.carrier());
        double worst_det = 0, worst_stat = 0;
        for (int n = 1; n <= 2; ++n) {
            rho = jumptime_map(rho, system).rho;
            rk = evolve_kernel(rk, kernel, 1);
            worst_det = std::max(worst_det, (rk.to_dense() - rho).cwiseAbs().maxCoeff());
            worst_stat = std::max(worst_stat, trace_distance(acc.density(n), rho));
        }
        double const bound = 5.0 / std::sqrt(double(n_traj));
        r.passed = worst_det <= 1e-9 && worst_stat <= bound;
        r.detail = "kernel vs map " + sci(worst_det) + " (<= 1e-9), trajectories vs map " + sci(worst_stat) +
                   " (<= " + sci(bound) + ")";
    });
}

CheckResult check_phase_winding(VerifyOptions const& options, KernelFactory const& factory) {
    return timed(3, "phase-winding identity", [&](CheckResult& r) {
        std::mt19937_64 rng(options.fixture_seed);
        double worst = 0, worst_int = 0;
        int failures = 0;
        for (int i = 0; i < 50; ++i) {
            auto const model = fixtures::random_chiral(rng);
            auto const w = winding_number(model, 0, fine());
            double t = 0;
            if (factory) {
                auto const q = kernel_phase(
                    [&](Momentum const& p, Momentum const& p2) { return factory(model, p, p2, 1.0); }, 1, 0, fine());
                t = q.value;
            } else {
                t = phase(model, DissipatorSpec::collective());
            }
            double const defect = std::abs(t - w.value);
            worst = std::max(worst, defect);
            worst_int = std::max(worst_int, w.residue);
            if (defect > 1e-6 || w.residue > 1e-6)
                ++failures;
        }
        r.passed = failures == 0;
        r.detail = "50 models, max |T - W| " + sci(worst) + ", max |W - round(W)| " + sci(worst_int) + ", " +
                   std::to_string(failures) + " failures";
    });
}

CheckResult check_decomposition(VerifyOptions const& options) {
    return timed(4, "decomposition identity", [&](CheckResult& r) {
        std::mt19937_64 rng(options.fixture_seed + 1);
        std::uniform_real_distribution<double> rate(0.5, 2.0);
        double worst = 0, largest_residual = 0;
        for (int i = 0; i < 20; ++i) {
            auto const model = fixtures::random_with_hz(rng);
            double const gamma = rate(rng);
            double const t = phase(model, DissipatorSpec::collective(Sublattice::A, gamma));
            auto const w = winding_number(model, 0, fine());
            auto const res = residual_terms(model, 0, gamma, fine());
            worst = std::max(worst, std::abs(t - (w.value + res.r1 + res.r2)));
            largest_residual = std::max(largest_residual, std::abs(res.r1 + res.r2));
        }
        r.passed = worst <= 1e-6;
        r.detail = "20 models, max |T - (W + R1 + R2)| " + sci(worst) + ", largest |R1 + R2| " + sci(largest_residual);
    });
}

CheckResult check_symmetry_residuals(VerifyOptions const& options) {
    return timed(5, "symmetry-forced residuals", [&](CheckResult& r) {
        std::mt19937_64 rng(options.fixture_seed + 2);
        auto const probe = MomentumGrid::line(256);
        double worst_trs = 0;
        bool symmetry_ok = true;
        for (int i = 0; i < 10; ++i) {
            auto const model = fixtures::random_trs(rng);
            symmetry_ok = symmetry_ok && symmetry_check(model, probe).trs;
            auto const res = residual_terms(model, 0, 1.0, fine());
            worst_trs = std::max({worst_trs, std::abs(res.r1), std::abs(res.r2)});
        }
        double witness = 0;
        for (auto const& model : fixtures::inversion_only()) {
            auto const s = symmetry_check(model, probe);
            symmetry_ok = symmetry_ok && s.inversion && !s.trs;
            auto const res = residual_terms(model, 0, 1.0, fine());
            witness = std::max({witness, std::abs(res.r1), std::abs(res.r2)});
        }
        r.passed = symmetry_ok && worst_trs <= 1e-10 && witness > 1e-4;
        r.detail = "TRS max |R| " + sci(worst_trs) + " (<= 1e-10), inversion-only witness " + sci(witness) +
                   " (> 1e-4)" + (symmetry_ok ? "" : ", fixture symmetry mismatch");
    });
}

CheckResult check_projector_mixture(VerifyOptions const&) {
    return timed(6, "projector and mixture phases", [&](CheckResult& r) {
        double worst_a = 0, worst_b = 0, worst_mix_b = 0, worst_mix_a = 0;
        for (auto const& model : {models::ssh(0.2, 0.5), models::ssh(0.5, 0.2), models::ssh(0.3, 1.1)}) {
            double const tcc = phase(model, DissipatorSpec::collective());
            worst_a = std::max(worst_a, std::abs(phase(model, DissipatorSpec::sublattice(Sublattice::A))));
            worst_b = std::max(worst_b, std::abs(phase(model, DissipatorSpec::sublattice(Sublattice::B))));
            for (double f : {0.25, 0.5, 0.75}) {
                auto const mix_b = DissipatorSpec::mixture(
                    {DissipatorSpec::collective(Sublattice::A, f), DissipatorSpec::sublattice(Sublattice::B, 1 - f)});
                worst_mix_b = std::max(worst_mix_b, std::abs(phase(model, mix_b) - f * tcc));
            }
            // equal rates make the damping a multiple of the identity
            auto const mix_a = DissipatorSpec::mixture(
                {DissipatorSpec::collective(Sublattice::A, 0.5), DissipatorSpec::sublattice(Sublattice::A, 0.5)});
            worst_mix_a = std::max(worst_mix_a, std::abs(phase(model, mix_a)));
        }
        r.passed = std::max({worst_a, worst_b, worst_mix_b, worst_mix_a}) <= 1e-8;
        r.detail = "max |T_A| " + sci(worst_a) + ", |T_B| " + sci(worst_b) + ", |T_cc+B - f T_cc| " +
                   sci(worst_mix_b) + ", |T_cc+A| (equal rates) " + sci(worst_mix_a) + " (each <= 1e-8)";
    });
}

CheckResult check_kick_invariance(VerifyOptions const&) {
    return timed(7, "kick-distribution invariance", [&](CheckResult& r) {
        auto const model = models::ssh(0.2, 0.5);
        std::vector<double> ts;
        double worst_sum = 0;
        for (auto const& g : {KickDistribution::delta(), KickDistribution::uniform(), KickDistribution::gaussian(1.0)}) {
            JumptimeKernel const kernel(model, DissipatorSpec::kick(g));
            auto const p = jumptime_phase(kernel, 0, fine());
            ts.push_back(p.value);
            if (p.kick_double_sum)
                worst_sum = std::max(worst_sum, std::abs(*p.kick_double_sum - p.value));
        }
        auto const [lo, hi] = std::minmax_element(ts.begin(), ts.end());
        double const spread = std::max(*hi - *lo, worst_sum);

        // one local-collapse step from a momentum wave packet: diagonal exactly uniform
        auto const grid = MomentumGrid::line(32);
        JumptimeKernel const local(model, DissipatorSpec::kick(KickDistribution::uniform()));
        Eigen::VectorXcd amp(grid.size());
        for (int k = 0; k < grid.size(); ++k)
            amp(k) = std::polar(std::exp(-std::pow(grid.at(k)[0] - 1.0, 2)), 0.3 * k);
        amp.normalize();
        DensityKernel packet{grid, amp * amp.adjoint(), local.carrier()};
        auto const next = evolve_kernel(packet, local, 1);
        Eigen::VectorXd const diag = next.rho.diagonal().real();
        double const kernel_dev = (diag.array() - diag.mean()).abs().maxCoeff();

        // same statement for the dense map with one operator per cell
        auto const small = MomentumGrid::line(12);
        auto const system = DenseSystem::build(model, DissipatorSpec::kick(KickDistribution::uniform()), small);
        DenseMatrix const u = momentum_basis(small);
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(2 * small.size());
        for (int k = 0; k < small.size(); ++k)
            psi(2 * k) = std::exp(-std::pow(small.at(k)[0] - 1.0, 2));
        psi.normalize();
        DenseMatrix const rho0 = u * (psi * psi.adjoint()) * u.adjoint();
        DenseMatrix const mom = u.adjoint() * jumptime_map(rho0, system).rho * u;
        Eigen::VectorXd weights(small.size());
        for (int k = 0; k < small.size(); ++k)
            weights(k) = (mom(2 * k, 2 * k) + mom(2 * k + 1, 2 * k + 1)).real();
        double const map_dev = (weights.array() - weights.mean()).abs().maxCoeff();

        r.passed = spread <= 1e-6 && kernel_dev <= 1e-14 && map_dev <= 1e-12;
        r.detail = "T spread over G " + sci(spread) + " (<= 1e-6), kernel diagonal after one step " +
                   sci(kernel_dev) + ", dense map diagonal " + sci(map_dev);
    });
}

CheckResult check_torus(VerifyOptions const&) {
    return timed(8, "torus phases", [&](CheckResult& r) {
        bool ok = true;
        std::ostringstream info;
        for (double u : {6.0, 14.0}) {
            auto const model = models::torus2d(u, 10.0, 1.0);
            JumptimeKernel const kernel(model, DissipatorSpec::collective());
            double const t1 = jumptime_phase(kernel, 0, fine()).value;
            double const t2 = jumptime_phase(kernel, 1, fine()).value;
            double const spread = std::max(winding_number(model, 0, fine()).slice_spread,
                                           winding_number(model, 1, fine()).slice_spread);
            double const chern = curvature_chern(kernel).chern;
            double const expected = u < 10.0 ? -1.0 : 0.0;
            ok = ok && std::abs(t1 - expected) <= 1e-6 && std::abs(t2) <= 1e-6 && spread <= 1e-8 &&
                 std::abs(chern) <= 1e-6;
            info << "u=" << u << ": T1 " << std::setprecision(10) << t1 << ", T2 " << sci(t2) << ", spread "
                 << sci(spread) << ", C " << sci(chern) << "; ";
        }
        r.passed = ok;
        r.detail = info.str();
    });
}

CheckResult check_covariance(VerifyOptions const&) {
    return timed(9, "primitive-vector covariance", [&](CheckResult& r) {
        auto const diagonal = fixtures::chiral_model(2, {{{0, 0}, 0.3}, {{-1, -1}, 1.0}}, "diagonal");
        std::vector<std::pair<ModelSpec, std::vector<int>>> cases{{models::torus2d(6, 10, 1), {-1, 1}},
                                                                  {diagonal, {1, 2, -1}}};
        double worst = 0;
        for (auto const& [model, ms] : cases) {
            auto const d = DissipatorSpec::collective();
            std::array<double, 2> const t{phase(model, d, 0), phase(model, d, 1)};
            for (int m : ms)
                worst = std::max(worst, transform_phases(t, model, d, m, 1e-6, fine()).max_deviation);
        }
        r.passed = worst <= 1e-6;
        r.detail = "max deviation from the law and of T1 a1 + T2 a2: " + sci(worst);
    });
}

CheckResult check_steady_state(VerifyOptions const& options) {
    return timed(10, "steady state", [&](CheckResult& r) {
        // numeric oracle on L = 16 from a translation-invariant start
        double worst_numeric = 0;
        auto const grid = MomentumGrid::line(16);
        for (auto const& [v, w] : {std::pair{0.2, 0.5}, std::pair{0.5, 0.2}}) {
            auto const model = models::ssh(v, w);
            auto const system = DenseSystem::build(model, DissipatorSpec::collective(), grid);
            DenseMatrix rho0 = DenseMatrix::Zero(32, 32);
            for (int j = 0; j < 16; ++j)
                rho0(2 * j, 2 * j) = 1.0 / 16;
            auto const ss = steady_state_numeric(system, rho0);
            auto const blochs = momentum_bloch_vectors(ss.rho, grid);
            for (int k = 0; k < grid.size(); ++k)
                worst_numeric =
                    std::max(worst_numeric, (blochs[k] - bloch_steady_state(model, 1.0, grid.at(k))).cwiseAbs().maxCoeff());
        }

        std::mt19937_64 rng(options.fixture_seed + 3);
        std::uniform_real_distribution<double> par(0.05, 2.0), mom(0, two_pi);
        double worst_residual = 0;
        for (int i = 0; i < 200; ++i) {
            auto const model = models::ssh(par(rng), par(rng));
            double const gamma = par(rng);
            Momentum const p{mom(rng), 0};
            worst_residual =
                std::max(worst_residual, lindblad_block_residual(model, gamma, p, bloch_steady_state(model, gamma, p)));
        }

        double const g_top = 0.01 * 1.0, g_triv = 0.01 * 1.0;
        double const top = ssh_steady_current(1.0, 10.0, g_top);   // w = 10 v, gamma = 0.01 v
        double const triv = ssh_steady_current(10.0, 1.0, g_triv); // v = 10 w, gamma = 0.01 w
        bool const limits = std::abs(top - g_top / 2) <= 0.01 * g_top / 2 && std::abs(triv) <= 0.01 * g_triv / 2;

        double const eps = 1e-7;
        double const jump_current =
            std::abs(ssh_steady_current(1 + eps, 1.0, 0.5) - ssh_steady_current(1 - eps, 1.0, 0.5));
        auto const d = DissipatorSpec::collective(Sublattice::A, 0.5);
        double const step = phase(models::ssh(0.99, 1.0), d) - phase(models::ssh(1.01, 1.0), d);

        r.passed = worst_numeric <= 1e-8 && worst_residual <= 1e-12 && limits && jump_current <= 1e-6 &&
                   std::abs(step - 1.0) <= 1e-6;
        r.detail = "numeric vs closed form " + sci(worst_numeric) + ", residual " + sci(worst_residual) +
                   ", limits " + (limits ? "ok" : "off") + " (" + sci(top / (g_top / 2)) + ", " +
                   sci(triv / (g_triv / 2)) + " of gamma/2), current jump " + sci(jump_current) + ", aT step " +
                   sci(step);
    });
}

CheckResult check_directional(VerifyOptions const& options) {
    return timed(11, "directional hop", [&](CheckResult& r) {
        auto const model = models::directional_chain(0.25);
        auto const diss = DissipatorSpec::directional_hop();

        // per trajectory
        auto const grid = MomentumGrid::line(64);
        TrajectorySimulator const sim(model, diss, grid);
        auto const init = PureState::localized(grid, {0, 0}, Vec2(1, 0));
        double worst_traj = 0;
        for (int i = 0; i < 50; ++i) {
            auto const rec = sim.run(init, 4, options.base_seed, i);
            for (int n = 1; n < int(rec.snapshots.size()); ++n)
                worst_traj = std::max(worst_traj, std::abs(rec.snapshots[n].x[0] - rec.snapshots[0].x[0] - n));
            if (rec.snapshots.size() != 5)
                worst_traj = std::numeric_limits<double>::infinity();
        }

        // via the dense jumptime map
        auto const system = DenseSystem::build(model, diss, grid);
        DenseMatrix rho = localized_density(grid, {0, 0}, Sublattice::A);
        double worst_map = 0;
        for (int n = 1; n <= 4; ++n) {
            rho = jumptime_map(rho, system).rho;
            worst_map = std::max(worst_map, std::abs(dense_mean_position(rho, grid, 0, 0) - n));
        }

        // walltime from the master equation, j0 = 3
        int const j0 = 3;
        double const tol = 1e-10;
        DenseMatrix state = localized_density(grid, {j0, 0}, Sublattice::A);
        double worst_wall = 0, now = 0;
        for (double t : {0.5, 1.0, 2.0, 3.0}) {
            state = integrate_master(state, system, t - now, tol).rho;
            now = t;
            worst_wall = std::max(worst_wall, std::abs(dense_mean_position(state, grid, 0, j0) - (j0 + t)));
        }

        r.passed = worst_traj <= 1e-12 && worst_map <= 1e-12 && worst_wall <= 1e-7;
        r.detail = "per trajectory " + sci(worst_traj) + ", map " + sci(worst_map) + " (<= 1e-12), master " +
                   sci(worst_wall) + " (<= 1e-7)";
    });
}

std::vector<CheckResult> acceptance_suite(VerifyOptions const& options) {
    return {check_fig2(options),           check_oracle_chain(options),       check_phase_winding(options),
            check_decomposition(options),  check_symmetry_residuals(options), check_projector_mixture(options),
            check_kick_invariance(options), check_torus(options),             check_covariance(options),
            check_steady_state(options),   check_directional(options)};
}

std::vector<CheckResult> supplementary_checks(VerifyOptions const& options) {
    std::vector<CheckResult> out;

    out.push_back(timed(12, "mutation fixture caught", [&](CheckResult& r) {
        // conjugated numerator: (hx - i hy)(p) (hx + i hy)(p2)
        KernelFactory const flipped = [](ModelSpec const& model, Momentum const& p, Momentum const& p2, double gamma) {
            return std::conj(k_cc(model, p, p2, gamma));
        };
        auto const mutated = check_phase_winding(options, flipped);
        r.passed = !mutated.passed;
        r.detail = "mutated check reports: " + mutated.detail;
    }));

    out.push_back(timed(13, "gamma rescaling", [&](CheckResult& r) {
        // H and gamma scaled together: same jumps, times divided by 10
        auto const grid = MomentumGrid::line(64);
        auto const init = PureState::localized(grid, {0, 0}, Vec2(1, 0));
        double worst_x = 0, worst_t = 0;
        bool same_channels = true;
        for (int i = 0; i < 20; ++i) {
            auto const a = run_trajectory(init, models::ssh(0.2, 0.5), DissipatorSpec::collective(), 4,
                                          options.base_seed, i);
            auto const b = run_trajectory(init, models::ssh(2.0, 5.0),
                                          DissipatorSpec::collective(Sublattice::A, 10.0), 4, options.base_seed, i);
            same_channels = same_channels && a.jumps.size() == b.jumps.size();
            for (std::size_t n = 0; n < std::min(a.snapshots.size(), b.snapshots.size()); ++n)
                worst_x = std::max(worst_x, std::abs(a.snapshots[n].x[0] - b.snapshots[n].x[0]));
            for (std::size_t n = 0; n < std::min(a.jumps.size(), b.jumps.size()); ++n)
                worst_t = std::max(worst_t, std::abs(a.jumps[n].time - 10 * b.jumps[n].time) /
                                                std::max(1.0, a.jumps[n].time));
        }
        r.passed = same_channels && worst_x <= 1e-12 && worst_t <= 1e-9;
        r.detail = "max |<x>_n difference| " + sci(worst_x) + ", max relative time mismatch " + sci(worst_t);
    }));

    out.push_back(timed(14, "cc+A phase against trajectories", [&](CheckResult& r) {
        // the kernel phase, not zero, is what the unraveling transports
        auto const model = models::ssh(0.3, 1.1);
        auto const diss = DissipatorSpec::mixture(
            {DissipatorSpec::collective(Sublattice::A, 0.5), DissipatorSpec::sublattice(Sublattice::A, 0.5)});
        double const t = phase(model, diss);
        auto const grid = MomentumGrid::line(64);
        EnsembleConfig cfg;
        cfg.trajectories = 1000;
        cfg.n_max = 4;
        cfg.base_seed = options.base_seed;
        auto const acc = ensemble_average(model, diss, PureState::localized(grid, {0, 0}, Vec2(1, 0)), cfg);
        auto const& x = acc.slots[4].scalars[0];
        double const se = x.std_err();
        r.passed = std::abs(x.mean - 4 * t) <= 4 * se;
        r.detail = "T " + sci(t) + ", <x>_4 / 4 " + sci(x.mean / 4) + " (4 SE " + sci(se) + ")";
    }));
    return out;
}

std::string format_report(std::vector<CheckResult> const& results) {
    std::ostringstream out;
    for (auto const& r : results)
        out << (r.passed ? "PASS" : "FAIL") << " " << std::setw(2) << r.id << " " << r.name << " (" << std::fixed
            << std::setprecision(1) << r.seconds << " s): " << r.detail << "\n";
    return out.str();
}

} // namespace jumptime
