#include "jumptime/experiments.hpp"
#include "jumptime/propagators.hpp"
#include "jumptime/reference_solvers.hpp"
#include "jumptime/steady_state.hpp"
#include "jumptime/verification.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace jumptime {

namespace {

constexpr int dense_limit = 2048;

std::string fmt(double x) { return format_number(x); }
std::string fmt(long x) { return std::to_string(x); }
std::string fmt(int x) { return std::to_string(x); }

QuadratureOptions quadrature_of(ExperimentConfig const& c) {
    QuadratureOptions q;
    q.start_points = c.momentum_points;
    q.tolerance = c.quadrature_tolerance;
    return q;
}

MomentumGrid lattice_of(ExperimentConfig const& c, ModelSpec const& model) {
    return MomentumGrid::for_model(model, c.cells);
}

Vec2 intracell(Sublattice s) { return s == Sublattice::A ? Vec2(1, 0) : Vec2(0, 1); }

json quadrature_json(Quadrature const& q) {
    json steps = json::array();
    for (auto const& s : q.history)
        steps.push_back({{"points", s.points}, {"value", s.value}});
    return {{"value", q.value}, {"points", q.points}, {"converged", q.converged}, {"history", steps}};
}

json sidecar(ExperimentConfig const& c, std::string const& hash, long trapped) {
    return {{"config", config_to_json(c)},
            {"config_hash", hash},
            {"seeds", {{"base_seed", c.base_seed}, {"generator", Philox4x64::algorithm},
                       {"stream", "trajectory index"}}},
            {"dark_trapped", trapped},
            {"tool_version", JUMPTIME_VERSION}};
}

void seam_guard(ExperimentOutput& out, double seam, double limit) {
    out.summary["max_seam_occupancy"] = seam;
    if (seam >= limit) {
        out.status = 1;
        out.message = "boundary guard: seam occupancy " + fmt(seam) + " exceeds " + fmt(limit);
    }
}

ExperimentOutput run_trajectories(ExperimentConfig const& c, std::string const& hash) {
    auto const model = c.model_spec();
    auto const grid = lattice_of(c, model);
    EnsembleConfig ec;
    ec.trajectories = c.trajectories;
    ec.n_max = c.n_max;
    ec.base_seed = c.base_seed;
    ec.engine.center = c.init_cell;
    auto const init = PureState::localized(grid, c.init_cell, intracell(c.init_sublattice));
    auto const acc = ensemble_average(model, c.dissipator, init, ec);

    ExperimentOutput out;
    out.dark_trapped = acc.trapped;
    out.files.push_back({"trajectories.csv", ensemble_table(acc).str(), "ensemble/1"});

    CsvTable hist{{"n", "cell", "occupancy", "std_err"}, {}};
    for (std::size_t n = 0; n < acc.slots.size(); ++n)
        for (std::size_t j = 0; j < acc.slots[n].position.size(); ++j)
            hist.add({fmt(int(n)), fmt(int(j)), fmt(acc.slots[n].position[j].mean),
                      fmt(acc.slots[n].position[j].std_err())});
    out.files.push_back({"position_histogram.csv", hist.str(), "histogram/1"});
    out.files.push_back({"trajectories.json", sidecar(c, hash, acc.trapped).dump(2) + "\n", ""});
    seam_guard(out, max_seam_occupancy(acc), c.seam_limit);
    return out;
}

ExperimentOutput run_walltime(ExperimentConfig const& c, std::string const& hash) {
    auto const model = c.model_spec();
    auto const grid = lattice_of(c, model);
    std::vector<double> times = c.times;
    if (times.empty())
        times = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    double const gamma = c.dissipator.total_rate();

    EnsembleConfig ec;
    ec.trajectories = c.trajectories;
    ec.base_seed = c.base_seed;
    ec.readout = Readout::Walltime;
    for (double t : times)
        ec.times.push_back(t);
    ec.engine.center = c.init_cell;
    auto const init = PureState::localized(grid, c.init_cell, intracell(c.init_sublattice));
    auto const acc = ensemble_average(model, c.dissipator, init, ec);

    ExperimentOutput out;
    out.dark_trapped = acc.trapped;
    out.files.push_back({"walltime.csv", ensemble_table(acc, "t").str(), "ensemble/1"});

    // master-equation reference for lattices small enough to treat densely
    if (2 * grid.size() <= 256) {
        auto const system = DenseSystem::build(model, c.dissipator, grid);
        DenseMatrix rho = localized_density(grid, c.init_cell, c.init_sublattice);
        CsvTable master{{"t", "observable", "value"}, {}};
        double now = 0;
        for (double t : times) {
            if (t > now)
                rho = integrate_master(rho, system, (t - now) * 1.0, c.integrator_tolerance).rho;
            now = t;
            for (int axis = 0; axis < grid.dimension; ++axis)
                master.add({fmt(t), axis == 0 ? "x1" : "x2",
                            fmt(dense_mean_position(rho, grid, axis, c.init_cell[axis]))});
        }
        out.files.push_back({"walltime_master.csv", master.str(), "series/1"});
    }
    out.summary["gamma"] = gamma;
    out.files.push_back({"walltime.json", sidecar(c, hash, acc.trapped).dump(2) + "\n", ""});
    seam_guard(out, max_seam_occupancy(acc), c.seam_limit);
    return out;
}

ExperimentOutput run_jumptime_map(ExperimentConfig const& c, std::string const&) {
    auto const model = c.model_spec();
    auto const grid = lattice_of(c, model);
    if (2 * grid.size() > dense_limit)
        throw ValidationError("jumptime-map needs 2 L^d <= " + std::to_string(dense_limit) + "; reduce cells");
    auto const system = DenseSystem::build(model, c.dissipator, grid);

    std::optional<JumptimeKernel> kernel;
    Mat2 const start = ket_bra(c.init_sublattice, c.init_sublattice);
    try {
        kernel.emplace(model, c.dissipator);
        if ((kernel->carrier() - start).norm() > 1e-12)
            kernel.reset();
    } catch (ValidationError const&) {
    }

    ExperimentOutput out;
    CsvTable series{{"n", "observable", "value"}, {}};
    DenseMatrix rho = localized_density(grid, c.init_cell, c.init_sublattice);
    std::optional<DensityKernel> rk;
    if (kernel)
        rk = DensityKernel::localized(grid, c.init_cell, kernel->carrier());
    double worst = 0;
    bool fallback = false;
    for (int n = 0; n <= c.n_max; ++n) {
        if (n > 0) {
            auto const step = jumptime_map(rho, system);
            rho = step.rho;
            fallback = fallback || step.schur_fallback;
            series.add({fmt(n), "condition", fmt(step.condition)});
            if (rk) {
                rk = evolve_kernel(*rk, *kernel, 1);
                double const dev = (rk->to_dense() - rho).cwiseAbs().maxCoeff();
                worst = std::max(worst, dev);
                series.add({fmt(n), "kernel_deviation", fmt(dev)});
            }
        }
        double const tr = rho.trace().real();
        series.add({fmt(n), "trace", fmt(tr)});
        for (int axis = 0; axis < grid.dimension; ++axis)
            series.add({fmt(n), axis == 0 ? "x1" : "x2",
                        tr > 0 ? fmt(dense_mean_position(rho, grid, axis, c.init_cell[axis])) : "nan"});
        double pop_a = 0;
        for (int j = 0; j < grid.size(); ++j)
            pop_a += rho(2 * j, 2 * j).real();
        series.add({fmt(n), "pop_A", fmt(pop_a)});
    }
    out.files.push_back({"jumptime_map.csv", series.str(), "series/1"});

    if (rk && grid.dimension == 1) {
        CsvTable snap{{"k", "k2", "re", "im"}, {}};
        for (int k = 0; k < grid.size(); ++k)
            for (int k2 = 0; k2 < grid.size(); ++k2)
                snap.add({fmt(grid.at(k)[0]), fmt(grid.at(k2)[0]), fmt(rk->rho(k, k2).real()),
                          fmt(rk->rho(k, k2).imag())});
        out.files.push_back({"kernel_snapshot.csv", snap.str(), "kernel/1"});
    }
    out.summary["schur_fallback"] = fallback;
    if (kernel) {
        out.summary["kernel"] = to_string(kernel->kind());
        out.summary["kernel_max_deviation"] = worst;
        if (worst > 1e-9) {
            out.status = 1;
            out.message = "kernel and dense map disagree by " + fmt(worst);
        }
    }
    return out;
}

ExperimentOutput run_topology(ExperimentConfig const& c, std::string const&) {
    auto const model = c.model_spec();
    auto const q = quadrature_of(c);
    ExperimentOutput out;

    auto const grid = MomentumGrid::for_model(model, model.dimension() == 1 ? 1024 : 64);
    auto const dark = dark_set_report(model, c.dissipator, grid);
    auto const perp = h_perp_min(model, grid);
    if (perp.dark_contact) {
        throw DomainError("dark contact at k = (" + fmt(perp.argmin[0]) + ", " + fmt(perp.argmin[1]) +
                          "), h_perp = " + fmt(perp.value));
    }
    auto const report = topology_report(model, c.dissipator, q, c.curvature);
    json j = topology_to_json(report);
    j["dark_set"] = {{"dark_free", dark.dark_free}, {"contacts", dark.contacts.size()}};

    if (c.transform_m != 0 && model.dimension() == 2) {
        std::array<double, 2> const t{report.axes[0].phase.value, report.axes[1].phase.value};
        auto const tr = transform_phases(t, model, c.dissipator, c.transform_m, 1e-6, q);
        j["transform"] = {{"m", c.transform_m},
                          {"law", tr.law},
                          {"recomputed", tr.recomputed},
                          {"displacement_before", {tr.displacement_before.x(), tr.displacement_before.y()}},
                          {"displacement_after", {tr.displacement_after.x(), tr.displacement_after.y()}},
                          {"max_deviation", tr.max_deviation}};
    }
    out.files.push_back({"topology.json", j.dump(2) + "\n", ""});
    for (auto const& a : report.axes)
        if (std::isfinite(a.identity_defect) && a.identity_defect > 1e-6) {
            out.status = 1;
            out.message = "phase decomposition defect " + fmt(a.identity_defect);
        }

    if (c.sweep) {
        CsvTable sweep{{"param", "W", "T", "R_1", "R_2", "defect"}, {}};
        for (double value : c.sweep->values) {
            auto const m = model_from_json(with_model_parameter(c.model, c.sweep->parameter, value));
            try {
                auto const r = topology_report(m, c.dissipator, q, false);
                auto const& a = r.axes[0];
                sweep.add({fmt(value), fmt(a.winding.value), fmt(a.phase.value),
                           a.residuals ? fmt(a.residuals->r1) : "nan", a.residuals ? fmt(a.residuals->r2) : "nan",
                           fmt(a.identity_defect)});
            } catch (DomainError const&) {
                sweep.add({fmt(value), "nan", "nan", "nan", "nan", "nan"});
            }
        }
        out.files.push_back({"topology_sweep.csv", sweep.str(), "sweep/1"});
    }
    return out;
}

ExperimentOutput run_steady_state(ExperimentConfig const& c, std::string const&) {
    std::vector<double> ratios = c.v_over_w;
    if (ratios.empty())
        for (int i = 0; i <= 40; ++i)
            ratios.push_back(std::pow(10.0, -1.0 + i / 20.0));
    std::vector<double> gammas = c.gammas;
    if (gammas.empty())
        gammas = {0.1, 0.5, 1.0};

    ExperimentOutput out;
    CsvTable table{{"v_over_w", "gamma", "J_ss", "a_times_T"}, {}};
    for (auto const& row : crossover_sweep(ratios, gammas))
        table.add({fmt(row.v_over_w), fmt(row.gamma), fmt(row.current), fmt(row.a_times_t)});
    out.files.push_back({"steady_state.csv", table.str(), "crossover/1"});
    json widths = json::array();
    for (double g : gammas)
        widths.push_back({{"gamma", g}, {"width", crossover_width(g)}});
    out.summary["crossover_widths"] = widths;
    return out;
}

ExperimentOutput run_fig2_experiment(ExperimentConfig const& c, std::string const& hash) {
    auto const runs = run_fig2(c.trajectories, c.n_max, c.cells, c.base_seed);
    auto const a = assess_fig2(runs, c.seam_limit);

    ExperimentOutput out;
    CsvTable transport{{"phase", "collapse", "n", "mean", "std_err", "count", "analytic"}, {}};
    CsvTable hist{{"phase", "collapse", "n", "cell", "occupancy"}, {}};
    for (auto const& r : runs) {
        double const t = r.setup.w > r.setup.v ? 1.0 : 0.0;
        for (std::size_t n = 0; n < r.ensemble.slots.size(); ++n) {
            auto const& s = r.ensemble.slots[n].scalars[0];
            transport.add({r.setup.phase, r.setup.collapse, fmt(int(n)), fmt(s.mean), fmt(s.std_err()),
                           fmt(s.count), fmt(double(n) * t)});
        }
        for (int n : {0, 3}) {
            if (n >= int(r.ensemble.slots.size()))
                continue;
            for (auto const& [cell, p] : centered_histogram(r.ensemble, n, c.cells))
                hist.add({r.setup.phase, r.setup.collapse, fmt(n), fmt(cell), fmt(p)});
        }
        out.dark_trapped += r.ensemble.trapped;
    }
    out.files.push_back({"fig2_transport.csv", transport.str(), "fig2-transport/1"});
    out.files.push_back({"fig2_histograms.csv", hist.str(), "fig2-histogram/1"});
    out.files.push_back({"fig2.json", sidecar(c, hash, out.dark_trapped).dump(2) + "\n", ""});
    out.summary["slope_topological_collective"] = a.topological_collective_slope;
    out.summary["skewness"] = {{"collective", a.skew_collective}, {"local", a.skew_local}};
    out.summary["max_seam_occupancy"] = a.max_seam;
    out.summary["assessment"] = a.detail;
    if (!a.transport_ok || !a.skew_ok) {
        out.status = 1;
        out.message = a.detail;
    }
    return out;
}

ExperimentOutput run_verify(ExperimentConfig const& c, std::string const&) {
    VerifyOptions options;
    options.base_seed = c.base_seed;
    auto results = acceptance_suite(options);
    auto const extra = supplementary_checks(options);
    results.insert(results.end(), extra.begin(), extra.end());

    ExperimentOutput out;
    CsvTable table{{"id", "name", "passed", "seconds", "detail"}, {}};
    json checks = json::array();
    for (auto const& r : results) {
        table.add({fmt(r.id), r.name, r.passed ? "1" : "0", fmt(r.seconds), r.detail});
        checks.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
        if (!r.passed)
            out.status = 1;
    }
    out.files.push_back({"verify.csv", table.str(), "verify/1"});
    out.summary["checks"] = checks;
    out.summary["report"] = format_report(results);
    if (out.status)
        out.message = "acceptance failures";
    return out;
}

std::string csv_cell(std::string const& s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char ch : s)
        q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

} // namespace

std::string format_number(double value) {
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto const res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void CsvTable::add(std::vector<std::string> row) {
    if (row.size() != header.size())
        throw Error("CSV row width does not match the header");
    rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::ostringstream out;
    auto line = [&](std::vector<std::string> const& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out << (i ? "," : "") << csv_cell(cells[i]);
        out << "\n";
    };
    line(header);
    for (auto const& r : rows)
        line(r);
    return out.str();
}

CsvTable ensemble_table(EnsembleAccumulator const& acc, std::string const& index_name) {
    CsvTable table{{index_name, "observable", "mean", "std_err", "count"}, {}};
    for (std::size_t slot = 0; slot < acc.slots.size(); ++slot) {
        std::string const label = slot < acc.slot_labels.size() ? fmt(acc.slot_labels[slot]) : fmt(int(slot));
        for (std::size_t i = 0; i < scalar_names.size(); ++i) {
            auto const& s = acc.slots[slot].scalars[i];
            table.add({label, scalar_names[i], fmt(s.mean), fmt(s.std_err()), fmt(s.count)});
        }
    }
    return table;
}

double max_seam_occupancy(EnsembleAccumulator const& acc) {
    double worst = 0;
    for (auto const& s : acc.slots)
        worst = std::max(worst, s.scalars[4].mean);
    return worst;
}

json topology_to_json(TopologyReport const& report) {
    json axes = json::array();
    for (std::size_t i = 0; i < report.axes.size(); ++i) {
        auto const& a = report.axes[i];
        json ax{{"axis", i},
                {"winding", {{"value", a.winding.value}, {"rounded", a.winding.rounded},
                             {"residue", a.winding.residue}, {"slice_spread", a.winding.slice_spread},
                             {"quadrature", quadrature_json(a.winding.quadrature)}}},
                {"phase", {{"value", a.phase.value}, {"kind", to_string(a.phase.kind)}, {"label", a.phase.label},
                           {"quadrature", quadrature_json(a.phase.quadrature)}}}};
        if (a.phase.kick_double_sum)
            ax["phase"]["kick_double_sum"] = *a.phase.kick_double_sum;
        if (a.residuals) {
            ax["residuals"] = {{"r1", a.residuals->r1}, {"r2", a.residuals->r2},
                               {"quadrature", quadrature_json(a.residuals->quadrature)}};
            ax["identity_defect"] = a.identity_defect;
        }
        axes.push_back(ax);
    }
    json out{{"model", report.model},
             {"dissipator", report.dissipator},
             {"dimension", report.dimension},
             {"axes", axes},
             {"symmetry",
              {{"chiral", report.symmetry.chiral}, {"pt", report.symmetry.pt}, {"trs", report.symmetry.trs},
               {"inversion", report.symmetry.inversion},
               {"residual_forced_zero", report.symmetry.residual_forced_zero}}}};
    if (report.curvature)
        out["chern"] = report.curvature->chern;
    return out;
}

std::vector<Fig2Case> fig2_cases() {
    std::vector<Fig2Case> cases;
    for (auto const& [phase, v, w] : {std::tuple{"topological", 0.2, 0.5}, std::tuple{"trivial", 0.5, 0.2}}) {
        cases.push_back({phase, "collective", v, w, DissipatorSpec::collective()});
        cases.push_back({phase, "local", v, w, DissipatorSpec::kick(KickDistribution::uniform())});
    }
    return cases;
}

std::vector<Fig2Run> run_fig2(long trajectories, int n_max, int cells, std::uint64_t base_seed) {
    std::vector<Fig2Run> runs;
    for (auto const& setup : fig2_cases()) {
        auto const model = models::ssh(setup.v, setup.w);
        auto const grid = MomentumGrid::line(cells);
        EnsembleConfig ec;
        ec.trajectories = trajectories;
        ec.n_max = n_max;
        ec.base_seed = base_seed;
        auto const init = PureState::localized(grid, {0, 0}, Vec2(1, 0));
        runs.push_back({setup, ensemble_average(model, setup.dissipator, init, ec)});
    }
    return runs;
}

std::vector<std::pair<int, double>> centered_histogram(EnsembleAccumulator const& acc, int n, int cells) {
    auto const& pos = acc.slots.at(n).position;
    std::vector<std::pair<int, double>> out;
    double total = 0;
    for (int j = 0; j < int(pos.size()); ++j) {
        out.push_back({centered_offset(j, 0, cells), pos[j].mean});
        total += pos[j].mean;
    }
    for (auto& e : out)
        e.second /= total;
    std::sort(out.begin(), out.end());
    return out;
}

double skewness(std::vector<std::pair<int, double>> const& histogram) {
    double mean = 0;
    for (auto const& [x, p] : histogram)
        mean += x * p;
    double m2 = 0, m3 = 0;
    for (auto const& [x, p] : histogram) {
        m2 += p * std::pow(x - mean, 2);
        m3 += p * std::pow(x - mean, 3);
    }
    return m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;
}

Fig2Assessment assess_fig2(std::vector<Fig2Run> const& runs, double seam_limit) {
    Fig2Assessment a;
    std::ostringstream info;
    for (auto const& r : runs) {
        double const t = r.setup.w > r.setup.v ? 1.0 : 0.0;
        a.max_seam = std::max(a.max_seam, max_seam_occupancy(r.ensemble));
        double sxy = 0, sxx = 0;
        for (std::size_t n = 1; n < r.ensemble.slots.size(); ++n) {
            auto const& s = r.ensemble.slots[n].scalars[0];
            double const allowed = std::max(4 * s.std_err(), 0.15);
            double const ratio = std::abs(s.mean - double(n) * t) / allowed;
            a.worst_ratio = std::max(a.worst_ratio, ratio);
            if (ratio > 1)
                a.transport_ok = false;
            sxy += double(n) * s.mean;
            sxx += double(n) * n;
        }
        if (r.setup.phase == "topological" && r.setup.collapse == "collective" && sxx > 0)
            a.topological_collective_slope = sxy / sxx;
        if (r.setup.phase == "topological" && r.ensemble.slots.size() > 3) {
            double const skew = skewness(centered_histogram(r.ensemble, 3, int(r.ensemble.slots[3].position.size())));
            (r.setup.collapse == "collective" ? a.skew_collective : a.skew_local) = skew;
        }
    }
    a.skew_ok = a.skew_collective > a.skew_local;
    if (a.max_seam >= seam_limit)
        a.transport_ok = false;
    info << "worst |<x>_n - n T| / bound " << fmt(a.worst_ratio) << ", slope " << fmt(a.topological_collective_slope)
         << ", skewness collective " << fmt(a.skew_collective) << " vs local " << fmt(a.skew_local)
         << ", seam " << fmt(a.max_seam);
    a.detail = info.str();
    return a;
}

ExperimentOutput run_experiment(ExperimentConfig const& config, std::string const& config_hash) {
    auto const& k = config.kind;
    if (k == "trajectories")
        return run_trajectories(config, config_hash);
    if (k == "walltime")
        return run_walltime(config, config_hash);
    if (k == "jumptime-map")
        return run_jumptime_map(config, config_hash);
    if (k == "topology")
        return run_topology(config, config_hash);
    if (k == "steady-state")
        return run_steady_state(config, config_hash);
    if (k == "fig2")
        return run_fig2_experiment(config, config_hash);
    if (k == "verify")
        return run_verify(config, config_hash);
    throw ValidationError("unknown experiment kind '" + k + "'");
}

} // namespace jumptime
