#pragma once
#include "jumptime/dissipator.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>

namespace jumptime {

using json = nlohmann::json;

/**
 Model JSON. Either a built-in shortcut

   {"ssh": {"v": 0.2, "w": 0.5}}, {"torus2d": {"u", "v", "w"}}, {"directional_chain": {"J"}}

 or an explicit hopping set

   {"dimension": 1, "lattice": {"a1": [1, 0], "a2": [0, 1]},
    "hoppings": [{"r": [1], "matrix": [[re, im], [re, im], [re, im], [re, im]]}]}

 with the matrix in row-major order (AA, AB, BA, BB). Unknown keys are rejected.
 */
json canonical_model(json const& model);
ModelSpec model_from_json(json const& model);
/// Explicit hopping form of any model.
json model_to_json(ModelSpec const& model);
/// Copy of a shortcut model with one parameter replaced (for sweeps).
json with_model_parameter(json const& model, std::string const& name, double value);

/**
 Dissipator JSON:

   {"type": "collective", "target": "A", "gamma": 1}
   {"type": "sublattice_A" | "sublattice_B", "gamma": 1}
   {"type": "kick", "G": {"type": "delta" | "uniform" | "gaussian", "sigma": 1}, "gamma": 1}
   {"type": "directional_hop", "axis": 0, "gamma": 1}
   {"type": "mixture", "components": [...]}
 */
DissipatorSpec dissipator_from_json(json const& dissipator);
json dissipator_to_json(DissipatorSpec const& dissipator);

struct SweepSpec {
    std::string parameter;
    std::vector<double> values;
};

/// Experiment kinds: trajectories, jumptime-map, walltime, topology, steady-state, fig2, verify.
struct ExperimentConfig {
    std::string kind = "trajectories";
    json model = json{{"ssh", {{"v", 0.2}, {"w", 0.5}}}};
    DissipatorSpec dissipator = DissipatorSpec::collective();
    long trajectories = 700;
    int n_max = 4;
    int cells = 64; ///< per axis
    int momentum_points = 0; ///< quadrature start per axis, 0 for the default
    std::uint64_t base_seed = 1;
    double quadrature_tolerance = 1e-8;
    double integrator_tolerance = 1e-10;
    double seam_limit = 1e-3;
    std::array<int, 2> init_cell{0, 0};
    Sublattice init_sublattice = Sublattice::A;
    std::vector<double> times;    ///< walltime sample times
    std::optional<SweepSpec> sweep;
    std::vector<double> v_over_w; ///< steady-state crossover grid
    std::vector<double> gammas;
    int transform_m = 0;
    bool curvature = true;

    ModelSpec model_spec() const { return model_from_json(model); }
};

/// Parses and validates; missing keys take the defaults above.
ExperimentConfig config_from_json(json const& config);
/// Canonical form: every field present, model and dissipator canonical.
json config_to_json(ExperimentConfig const& config);

std::vector<std::string> const& experiment_kinds();

} // namespace jumptime
