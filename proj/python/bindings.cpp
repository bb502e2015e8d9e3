#include <jumptime/experiments.hpp>
#include <jumptime/propagators.hpp>
#include <jumptime/steady_state.hpp>
#include <jumptime/topology.hpp>
#include <jumptime/verification.hpp>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace jumptime;

namespace {

Momentum momentum(std::vector<double> const& k) {
    if (k.empty() || k.size() > 2)
        throw ValidationError("momentum needs one or two components");
    return {k[0], k.size() == 2 ? k[1] : 0.0};
}

QuadratureOptions quadrature(int start, double tolerance) {
    QuadratureOptions q;
    q.start_points = start;
    q.tolerance = tolerance;
    return q;
}

} // namespace

PYBIND11_MODULE(_jumptime, m) {
    m.doc() = "Quantum-jump transport on two-band lattices";
    m.attr("__version__") = JUMPTIME_VERSION;

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<DarkTrapped>(m, "DarkTrapped", base.ptr());
    py::register_exception<DarkDivergence>(m, "DarkDivergence", base.ptr());
    py::register_exception<IntegrationError>(m, "IntegrationError", base.ptr());
    py::register_exception<AmbiguityError>(m, "AmbiguityError", base.ptr());
    py::register_exception<ConsistencyError>(m, "ConsistencyError", base.ptr());

    py::enum_<Sublattice>(m, "Sublattice").value("A", Sublattice::A).value("B", Sublattice::B);

    py::class_<ModelSpec>(m, "Model")
        .def_static("ssh", &models::ssh, py::arg("v"), py::arg("w"))
        .def_static("torus2d", &models::torus2d, py::arg("u"), py::arg("v"), py::arg("w"))
        .def_static("directional_chain", &models::directional_chain, py::arg("J"))
        .def_static("from_json", [](std::string const& s) { return model_from_json(json::parse(s)); })
        .def("to_json", [](ModelSpec const& self) { return model_to_json(self).dump(); })
        .def("transformed", &transform_primitive_vectors, py::arg("m"))
        .def_property_readonly("dimension", &ModelSpec::dimension)
        .def_property_readonly("name", &ModelSpec::name)
        .def("bloch_vector",
             [](ModelSpec const& self, std::vector<double> const& k) {
                 auto const h = bloch_vector(self, momentum(k));
                 return std::array<double, 4>{h.h0, h.hx, h.hy, h.hz};
             })
        .def("bloch_matrix", [](ModelSpec const& self, std::vector<double> const& k) {
            return Eigen::Matrix2cd(bloch_matrix(self, momentum(k)));
        });

    py::class_<DissipatorSpec>(m, "Dissipator")
        .def_static("collective", &DissipatorSpec::collective, py::arg("target") = Sublattice::A,
                    py::arg("rate") = 1.0)
        .def_static("sublattice", &DissipatorSpec::sublattice, py::arg("target"), py::arg("rate") = 1.0)
        .def_static(
            "kick",
            [](std::string const& shape, double sigma, double rate) {
                if (shape == "delta")
                    return DissipatorSpec::kick(KickDistribution::delta(), rate);
                if (shape == "uniform")
                    return DissipatorSpec::kick(KickDistribution::uniform(), rate);
                if (shape == "gaussian")
                    return DissipatorSpec::kick(KickDistribution::gaussian(sigma), rate);
                throw ValidationError("unknown kick shape '" + shape + "'");
            },
            py::arg("shape") = "uniform", py::arg("sigma") = 1.0, py::arg("rate") = 1.0)
        .def_static("directional_hop", &DissipatorSpec::directional_hop, py::arg("rate") = 1.0, py::arg("axis") = 0)
        .def_static("mixture", &DissipatorSpec::mixture, py::arg("parts"))
        .def_static("from_json", [](std::string const& s) { return dissipator_from_json(json::parse(s)); })
        .def("to_json", [](DissipatorSpec const& self) { return dissipator_to_json(self).dump(); })
        .def_property_readonly("total_rate", &DissipatorSpec::total_rate)
        .def_property_readonly("label", &DissipatorSpec::label);

    m.def(
        "k_cc",
        [](ModelSpec const& model, std::vector<double> const& p, std::vector<double> const& p2, double gamma) {
            return k_cc(model, momentum(p), momentum(p2), gamma);
        },
        py::arg("model"), py::arg("p"), py::arg("p2"), py::arg("gamma") = 1.0);

    m.def(
        "kernel",
        [](ModelSpec const& model, DissipatorSpec const& d, std::vector<double> const& p, std::vector<double> const& p2) {
            return JumptimeKernel(model, d)(momentum(p), momentum(p2));
        },
        py::arg("model"), py::arg("dissipator"), py::arg("p"), py::arg("p2"));

    m.def(
        "winding_number",
        [](ModelSpec const& model, int axis, int start, double tolerance) {
            return winding_number(model, axis, quadrature(start, tolerance)).value;
        },
        py::arg("model"), py::arg("axis") = 0, py::arg("start_points") = 0, py::arg("tolerance") = 1e-8);

    m.def(
        "jumptime_phase",
        [](ModelSpec const& model, DissipatorSpec const& d, int axis, int start, double tolerance) {
            return jumptime_phase(JumptimeKernel(model, d), axis, quadrature(start, tolerance)).value;
        },
        py::arg("model"), py::arg("dissipator"), py::arg("axis") = 0, py::arg("start_points") = 0,
        py::arg("tolerance") = 1e-8);

    m.def(
        "residual_terms",
        [](ModelSpec const& model, double gamma, int axis) {
            auto const r = residual_terms(model, axis, gamma);
            return std::pair{r.r1, r.r2};
        },
        py::arg("model"), py::arg("gamma") = 1.0, py::arg("axis") = 0);

    m.def(
        "topology_report",
        [](ModelSpec const& model, DissipatorSpec const& d, bool curvature) {
            return topology_to_json(topology_report(model, d, {}, curvature)).dump();
        },
        py::arg("model"), py::arg("dissipator"), py::arg("curvature") = false);

    m.def(
        "bloch_steady_state",
        [](ModelSpec const& model, double gamma, std::vector<double> const& p) {
            return Eigen::Vector3d(bloch_steady_state(model, gamma, momentum(p)));
        },
        py::arg("model"), py::arg("gamma"), py::arg("p"));
    m.def("ssh_steady_current", &ssh_steady_current, py::arg("v"), py::arg("w"), py::arg("gamma"));

    m.def(
        "simulate",
        [](ModelSpec const& model, DissipatorSpec const& d, long trajectories, int n_max, int cells,
           std::uint64_t seed) {
            auto const grid = MomentumGrid::for_model(model, cells);
            EnsembleConfig cfg;
            cfg.trajectories = trajectories;
            cfg.n_max = n_max;
            cfg.base_seed = seed;
            EnsembleAccumulator acc;
            {
                py::gil_scoped_release release;
                acc = ensemble_average(model, d, PureState::localized(grid, {0, 0}, Vec2(1, 0)), cfg);
            }
            py::dict out;
            std::vector<double> mean, err;
            for (auto const& s : acc.slots) {
                mean.push_back(s.scalars[0].mean);
                err.push_back(s.scalars[0].std_err());
            }
            out["mean_x"] = mean;
            out["std_err"] = err;
            out["trapped"] = acc.trapped;
            return out;
        },
        py::arg("model"), py::arg("dissipator"), py::arg("trajectories") = 200, py::arg("n_max") = 4,
        py::arg("cells") = 64, py::arg("seed") = 1);

    m.def(
        "jumptime_map_positions",
        [](ModelSpec const& model, DissipatorSpec const& d, int cells, int steps) {
            auto const grid = MomentumGrid::for_model(model, cells);
            auto const system = DenseSystem::build(model, d, grid);
            DenseMatrix rho = localized_density(grid, {0, 0}, Sublattice::A);
            std::vector<double> x{0.0};
            for (int n = 0; n < steps; ++n) {
                rho = jumptime_map(rho, system).rho;
                x.push_back(dense_mean_position(rho, grid, 0, 0));
            }
            return x;
        },
        py::arg("model"), py::arg("dissipator"), py::arg("cells") = 16, py::arg("steps") = 2);

    m.def(
        "run_experiment",
        [](std::string const& config) {
            auto const out = run_experiment(config_from_json(json::parse(config)), "");
            py::dict files;
            for (auto const& f : out.files)
                files[py::str(f.name)] = f.content;
            py::dict result;
            result["files"] = files;
            result["status"] = out.status;
            result["summary"] = out.summary.dump();
            return result;
        },
        py::arg("config_json"));

    m.def("canonical_config", [](std::string const& config) {
        return config_to_json(config_from_json(json::parse(config))).dump();
    });
}
