#pragma once
#include "jumptime/config.hpp"
#include "jumptime/topology.hpp"
#include "jumptime/trajectory.hpp"

namespace jumptime {

/// Shortest round-trip decimal form, so CSV output is reproducible bit for bit.
std::string format_number(double value);

/// CSV with a header row; cells are pre-formatted strings.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
    std::string str() const;
};

struct OutputFile {
    std::string name;
    std::string content;
    std::string schema; ///< versioned schema id, empty for JSON sidecars
};

/**
 Everything an experiment produces. `status` is 0 or 1 (consistency or guard
 failure); exceptions propagate to the caller, which maps them onto exit codes.
 */
struct ExperimentOutput {
    std::vector<OutputFile> files;
    json summary = json::object();
    long dark_trapped = 0;
    int status = 0;
    std::string message;
};

/// Runs the experiment named by config.kind. `config_hash` is embedded in sidecars.
ExperimentOutput run_experiment(ExperimentConfig const& config, std::string const& config_hash);

/// Trajectory ensemble CSV: (n, observable, mean, std_err, count).
CsvTable ensemble_table(EnsembleAccumulator const& acc, std::string const& index_name = "n");

/// Largest mean seam occupancy over the slots of an ensemble.
double max_seam_occupancy(EnsembleAccumulator const& acc);

json topology_to_json(TopologyReport const& report);

struct Fig2Case {
    std::string phase;    ///< "topological" (w > v) or "trivial"
    std::string collapse; ///< "collective" or "local"
    double v = 0;
    double w = 0;
    DissipatorSpec dissipator;
};

/// SSH with (v, w) in {(0.2, 0.5), (0.5, 0.2)}, collective and uniform-kick collapse, gamma = 1.
std::vector<Fig2Case> fig2_cases();

struct Fig2Run {
    Fig2Case setup;
    EnsembleAccumulator ensemble;
};

/// Four ensembles from |0> (x) |A> on a periodic ring of `cells` cells.
std::vector<Fig2Run> run_fig2(long trajectories, int n_max, int cells, std::uint64_t base_seed);

/// Normalized occupation per centered cell offset (-L/2, L/2] at slot n.
std::vector<std::pair<int, double>> centered_histogram(EnsembleAccumulator const& acc, int n, int cells);

double skewness(std::vector<std::pair<int, double>> const& histogram);

struct Fig2Assessment {
    bool transport_ok = true;
    /// Largest |<x>_n - n theta(w - v)| / max(4 SE, 0.15).
    double worst_ratio = 0;
    double max_seam = 0;
    double topological_collective_slope = 0;
    double skew_collective = 0;
    double skew_local = 0;
    bool skew_ok = false;
    std::string detail;
};

Fig2Assessment assess_fig2(std::vector<Fig2Run> const& runs, double seam_limit = 1e-3);

} // namespace jumptime
