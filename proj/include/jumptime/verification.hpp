#pragma once
#include "jumptime/topology.hpp"
#include "jumptime/trajectory.hpp"

#include <random>

namespace jumptime {

struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0;
};

struct VerifyOptions {
    std::uint64_t base_seed = 20240611;
    /// Seed of the random model fixtures (std::mt19937_64).
    std::uint64_t fixture_seed = 7;
};

/// Collective-collapse kernel as a function of (model, p, p2, gamma); the
/// phase-winding check accepts a replacement to exercise defect detection.
using KernelFactory = std::function<cplx(ModelSpec const&, Momentum const&, Momentum const&, double)>;

namespace fixtures {

/// Chiral model from <A|h|B>(k) = sum_r a_r exp(i k.r).
ModelSpec chiral_model(int dimension, std::vector<std::pair<Translation, cplx>> const& ab_terms,
                       std::string name = "chiral");

/// Dark-free chiral 1D model: one dominant term at a random translation in
/// [-range, range] plus weaker terms, so h_perp >= 0.2 everywhere.
ModelSpec random_chiral(std::mt19937_64& rng, int range = 2);

/// Random 1D model with h0 and h_z != 0 on top of a random_chiral skeleton.
ModelSpec random_with_hz(std::mt19937_64& rng, int range = 2);

/// Random real hopping set (time-reversal symmetric) with h_z != 0.
ModelSpec random_trs(std::mt19937_64& rng, int range = 2);

/// Inversion-symmetric models without time reversal (odd h_z).
std::vector<ModelSpec> inversion_only();

} // namespace fixtures

CheckResult check_fig2(VerifyOptions const& options);
CheckResult check_oracle_chain(VerifyOptions const& options);
CheckResult check_phase_winding(VerifyOptions const& options, KernelFactory const& kernel = {});
CheckResult check_decomposition(VerifyOptions const& options);
CheckResult check_symmetry_residuals(VerifyOptions const& options);
CheckResult check_projector_mixture(VerifyOptions const& options);
CheckResult check_kick_invariance(VerifyOptions const& options);
CheckResult check_torus(VerifyOptions const& options);
CheckResult check_covariance(VerifyOptions const& options);
CheckResult check_steady_state(VerifyOptions const& options);
CheckResult check_directional(VerifyOptions const& options);

/// The eleven acceptance criteria in order.
std::vector<CheckResult> acceptance_suite(VerifyOptions const& options = {});

/// Extra harness checks: the sign-flipped kernel is caught, and a joint 10x
/// rescaling of H and gamma leaves jumptime observables unchanged.
std::vector<CheckResult> supplementary_checks(VerifyOptions const& options = {});

/// One "PASS|FAIL <id> <name> (<seconds> s): <detail>" line per result.
std::string format_report(std::vector<CheckResult> const& results);

} // namespace jumptime
