#include "run_output.hpp"

#include <jumptime/experiments.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <map>
#include <iostream>
#include <sstream>

using namespace jumptime;

namespace {

enum Exit { ok = 0, consistency = 1, config_error = 2, dark_contact = 3 };

struct Overrides {
    std::string config_file;
    std::string output;
    std::optional<long> trajectories;
    std::optional<int> n_max;
    std::optional<int> cells;
    std::optional<int> momentum_points;
    std::optional<std::uint64_t> seed;
    std::optional<double> gamma;
    std::vector<double> times;
    std::string sweep_parameter;
    std::vector<double> sweep_values;
    std::optional<int> transform_m;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_file, "JSON experiment config");
    cmd->add_option("--output", o.output, "output directory (default runs/<kind>)");
    cmd->add_option("--seed", o.seed, "base seed");
}

void add_ensemble(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--trajectories", o.trajectories, "number of trajectories");
    cmd->add_option("--cells", o.cells, "ring length L per axis");
    cmd->add_option("--gamma", o.gamma, "total dissipation rate (rescales every component)");
}

ExperimentConfig load(std::string const& kind, Overrides const& o) {
    json raw = json::object();
    if (!o.config_file.empty()) {
        std::ifstream in(o.config_file);
        if (!in)
            throw ValidationError("cannot read config " + o.config_file);
        try {
            raw = json::parse(in);
        } catch (json::exception const& e) {
            throw ValidationError(std::string("invalid JSON in config: ") + e.what());
        }
    }
    raw["kind"] = kind;
    auto c = config_from_json(raw);
    if (o.trajectories)
        c.trajectories = *o.trajectories;
    if (o.n_max)
        c.n_max = *o.n_max;
    if (o.cells)
        c.cells = *o.cells;
    if (o.momentum_points)
        c.momentum_points = *o.momentum_points;
    if (o.seed)
        c.base_seed = *o.seed;
    if (o.gamma) {
        if (!(*o.gamma > 0))
            throw ValidationError("--gamma must be positive");
        c.dissipator = c.dissipator.scaled(*o.gamma / c.dissipator.total_rate());
    }
    if (!o.times.empty())
        c.times = o.times;
    if (!o.sweep_parameter.empty())
        c.sweep = SweepSpec{o.sweep_parameter, o.sweep_values};
    if (o.transform_m)
        c.transform_m = *o.transform_m;
    // re-validate the overridden config through the canonical form
    return config_from_json(config_to_json(c));
}

int run(std::string const& kind, Overrides const& o) {
    std::filesystem::path const dir = o.output.empty() ? std::filesystem::path("runs") / kind : std::filesystem::path(o.output);
    std::unique_ptr<RunDirectory> out;
    try {
        out = std::make_unique<RunDirectory>(dir);
    } catch (Error const& e) {
        std::cerr << "error: " << e.what() << "\n";
        return config_error;
    }

    RunManifest manifest;
    manifest.kind = kind;
    auto const start = std::chrono::steady_clock::now();
    try {
        auto const config = load(kind, o);
        std::string const canonical = config_to_json(config).dump(2) + "\n";
        manifest.config_hash = git_blob_sha1(canonical);
        out->write("config.json", canonical);
        manifest.files.push_back({"config.json", ""});
        manifest.hashes.push_back(git_blob_sha1(canonical));

        auto const result = run_experiment(config, manifest.config_hash);
        for (auto const& f : result.files) {
            out->write(f.name, f.content);
            manifest.files.push_back({f.name, f.schema});
            manifest.hashes.push_back(git_blob_sha1(f.content));
        }
        manifest.summary = result.summary;
        manifest.dark_trapped = result.dark_trapped;
        manifest.exit_code = result.status ? consistency : ok;
        manifest.error = result.message;
        if (result.summary.contains("report"))
            std::cout << result.summary["report"].get<std::string>();
        if (result.status)
            std::cerr << "failure: " << result.message << "\n";
    } catch (ValidationError const& e) {
        manifest.exit_code = config_error;
        manifest.error = std::string("config error: ") + e.what();
    } catch (DomainError const& e) {
        manifest.exit_code = dark_contact;
        manifest.error = std::string("dark contact: ") + e.what();
    } catch (DarkTrapped const& e) {
        manifest.exit_code = dark_contact;
        manifest.error = std::string("dark trapped: ") + e.what();
    } catch (DarkDivergence const& e) {
        manifest.exit_code = dark_contact;
        manifest.error = std::string("dark divergence: ") + e.what();
    } catch (std::exception const& e) {
        manifest.exit_code = consistency;
        manifest.error = e.what();
    }
    manifest.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (manifest.exit_code != ok && !manifest.error.empty())
        std::cerr << "error: " << manifest.error << "\n";
    try {
        out->write("manifest.json", manifest.to_json().dump(2) + "\n");
    } catch (std::exception const& e) {
        std::cerr << "error: cannot write manifest: " << e.what() << "\n";
    }
    std::cout << "wrote " << dir.string() << " (exit " << manifest.exit_code << ")\n";
    return manifest.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum-jump transport experiments on two-band lattices"};
    app.set_version_flag("--version", std::string(JUMPTIME_VERSION));
    app.require_subcommand(1);

    Overrides o;
    struct Command {
        char const* name;
        char const* kind;
        char const* help;
    };
    std::vector<Command> const commands{
        {"simulate", "trajectories", "jumptime trajectory ensemble"},
        {"jumptime-map", "jumptime-map", "exact jumptime map on a small lattice"},
        {"walltime", "walltime", "walltime trajectory readout with master-equation reference"},
        {"topology", "topology", "windings, jumptime phases and residual terms"},
        {"steady-state", "steady-state", "steady-state current crossover table"},
        {"fig2", "fig2", "SSH transport, two phases under collective and local collapse"},
        {"verify", "verify", "acceptance suite"},
    };
    std::map<CLI::App*, std::string> kinds;
    for (auto const& c : commands) {
        auto* cmd = app.add_subcommand(c.name, c.help);
        kinds[cmd] = c.kind;
        add_common(cmd, o);
        std::string const name = c.name;
        if (name == "simulate" || name == "walltime" || name == "fig2" || name == "jumptime-map")
            add_ensemble(cmd, o);
        if (name == "simulate" || name == "fig2" || name == "jumptime-map")
            cmd->add_option("--n-max", o.n_max, "number of jumps");
        if (name == "walltime")
            cmd->add_option("--times", o.times, "sample times in units of 1/gamma")->delimiter(',');
        if (name == "topology") {
            cmd->add_option("--momentum-points", o.momentum_points, "initial quadrature points per axis");
            cmd->add_option("--sweep-parameter", o.sweep_parameter, "model parameter to sweep");
            cmd->add_option("--sweep-values", o.sweep_values, "comma-separated sweep values")->delimiter(',');
            cmd->add_option("--transform-m", o.transform_m, "primitive-vector transformation a2 -> a2 + m a1");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (CLI::Success const& e) {
        return app.exit(e);
    } catch (CLI::ParseError const& e) {
        app.exit(e);
        return config_error;
    }
    for (auto const& [cmd, kind] : kinds)
        if (cmd->parsed())
            return run(kind, o);
    return config_error;
}
