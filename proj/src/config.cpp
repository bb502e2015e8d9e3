#include "jumptime/config.hpp"

#include <algorithm>
#include <set>

namespace jumptime {

namespace {

void allow_keys(json const& object, std::set<std::string> const& allowed, std::string const& where) {
    if (!object.is_object())
        throw ValidationError(where + " must be a JSON object");
    for (auto const& [key, _] : object.items())
        if (!allowed.count(key))
            throw ValidationError("unknown key '" + key + "' in " + where);
}

double number(json const& object, char const* key, std::string const& where) {
    if (!object.contains(key))
        throw ValidationError("missing '" + std::string(key) + "' in " + where);
    if (!object[key].is_number())
        throw ValidationError("'" + std::string(key) + "' in " + where + " must be a number");
    return object[key].get<double>();
}

double number_or(json const& object, char const* key, double fallback, std::string const& where) {
    return object.contains(key) ? number(object, key, where) : fallback;
}

struct Shortcut {
    char const* name;
    std::vector<char const*> params;
};

std::vector<Shortcut> const& shortcuts() {
    static std::vector<Shortcut> const list{
        {"ssh", {"v", "w"}}, {"torus2d", {"u", "v", "w"}}, {"directional_chain", {"J"}}};
    return list;
}

Shortcut const* find_shortcut(json const& model) {
    if (!model.is_object() || model.size() != 1)
        return nullptr;
    for (auto const& s : shortcuts())
        if (model.contains(s.name))
            return &s;
    return nullptr;
}

Eigen::Vector2d vector2(json const& value, std::string const& where) {
    if (!value.is_array() || value.size() != 2)
        throw ValidationError(where + " must be a 2-vector");
    return {value[0].get<double>(), value[1].get<double>()};
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

KickDistribution kick_from_json(json const& g) {
    allow_keys(g, {"type", "sigma", "values"}, "G");
    std::string const type = g.value("type", "delta");
    if (type == "delta")
        return KickDistribution::delta();
    if (type == "uniform")
        return KickDistribution::uniform();
    if (type == "gaussian") {
        double const sigma = number(g, "sigma", "gaussian G");
        if (!(sigma > 0))
            throw ValidationError("gaussian G needs sigma > 0");
        return KickDistribution::gaussian(sigma);
    }
    if (type == "table")
        return KickDistribution::from_table(g.at("values").get<std::vector<double>>());
    throw ValidationError("unknown G type '" + type + "'");
}

json kick_to_json(KickDistribution const& g) {
    switch (g.shape) {
    case KickShape::Delta:
        return {{"type", "delta"}};
    case KickShape::Uniform:
        return {{"type", "uniform"}};
    case KickShape::Gaussian:
        return {{"type", "gaussian"}, {"sigma", g.sigma}};
    case KickShape::Table:
        return {{"type", "table"}, {"values", g.table}};
    }
    return {};
}

Sublattice sublattice_from(json const& value) {
    auto const s = value.get<std::string>();
    if (s == "A")
        return Sublattice::A;
    if (s == "B")
        return Sublattice::B;
    throw ValidationError("sublattice must be \"A\" or \"B\"");
}

DissipatorSpec parse_dissipator(json const& d) {
    if (!d.is_object())
        throw ValidationError("dissipator must be a JSON object");
    std::string const type = d.value("type", "");
    if (type == "mixture") {
        allow_keys(d, {"type", "components"}, "mixture dissipator");
        std::vector<DissipatorSpec> parts;
        for (auto const& c : d.at("components"))
            parts.push_back(parse_dissipator(c));
        if (parts.empty())
            throw ValidationError("mixture needs at least one component");
        return DissipatorSpec::mixture(parts);
    }
    double const gamma = number_or(d, "gamma", 1.0, "dissipator");
    if (!(gamma > 0))
        throw ValidationError("dissipator rate must be positive");
    if (type == "collective") {
        allow_keys(d, {"type", "target", "gamma"}, "collective dissipator");
        return DissipatorSpec::collective(d.contains("target") ? sublattice_from(d["target"]) : Sublattice::A, gamma);
    }
    if (type == "sublattice_A" || type == "sublattice_B") {
        allow_keys(d, {"type", "gamma"}, "sublattice dissipator");
        return DissipatorSpec::sublattice(type == "sublattice_A" ? Sublattice::A : Sublattice::B, gamma);
    }
    if (type == "kick") {
        allow_keys(d, {"type", "G", "gamma"}, "kick dissipator");
        return DissipatorSpec::kick(d.contains("G") ? kick_from_json(d["G"]) : KickDistribution::delta(), gamma);
    }
    if (type == "directional_hop") {
        allow_keys(d, {"type", "axis", "gamma"}, "directional_hop dissipator");
        int const axis = d.value("axis", 0);
        if (axis < 0 || axis > 1)
            throw ValidationError("directional_hop axis must be 0 or 1");
        return DissipatorSpec::directional_hop(gamma, axis);
    }
    throw ValidationError("unknown dissipator type '" + type + "'");
}

json component_to_json(DissipatorComponent const& c) {
    switch (c.kind) {
    case ChannelKind::Collective:
        return {{"type", "collective"}, {"target", name(c.target)}, {"gamma", c.rate}};
    case ChannelKind::SublatticeProjector:
        return {{"type", std::string("sublattice_") + name(c.target)}, {"gamma", c.rate}};
    case ChannelKind::Kick:
        return {{"type", "kick"}, {"G", kick_to_json(c.kick)}, {"gamma", c.rate}};
    case ChannelKind::DirectionalHop:
        return {{"type", "directional_hop"}, {"axis", c.axis}, {"gamma", c.rate}};
    }
    return {};
}

template <class F>
auto guarded(F&& f) {
    try {
        return f();
    } catch (json::exception const& e) {
        throw ValidationError(std::string("malformed JSON config: ") + e.what());
    }
}

} // namespace

json canonical_model(json const& model) {
    return guarded([&] {
        if (auto const* s = find_shortcut(model)) {
            auto const& params = model[s->name];
            std::set<std::string> allowed(s->params.begin(), s->params.end());
            allow_keys(params, allowed, std::string(s->name) + " model");
            json out = json::object();
            for (auto const* p : s->params)
                out[p] = number(params, p, s->name);
            return json{{s->name, out}};
        }
        return model_to_json(model_from_json(model));
    });
}

ModelSpec model_from_json(json const& model) {
    return guarded([&] {
        if (auto const* s = find_shortcut(model)) {
            auto const& p = model[s->name];
            std::string const where = s->name;
            if (where == "ssh")
                return models::ssh(number(p, "v", where), number(p, "w", where));
            if (where == "torus2d")
                return models::torus2d(number(p, "u", where), number(p, "v", where), number(p, "w", where));
            return models::directional_chain(number(p, "J", where));
        }
        allow_keys(model, {"dimension", "lattice", "hoppings", "name"}, "model");
        int const dim = model.at("dimension").get<int>();
        std::vector<Hopping> hoppings;
        for (auto const& h : model.at("hoppings")) {
            allow_keys(h, {"r", "matrix"}, "hopping");
            auto const r = h.at("r").get<std::vector<int>>();
            if (int(r.size()) != dim)
                throw ValidationError("hopping translation length must equal the dimension");
            auto const& m = h.at("matrix");
            if (!m.is_array() || m.size() != 4)
                throw ValidationError("hopping matrix needs four [re, im] entries");
            Hopping hop;
            hop.r = {r[0], dim == 2 ? r[1] : 0};
            for (int i = 0; i < 4; ++i) {
                if (!m[i].is_array() || m[i].size() != 2)
                    throw ValidationError("hopping matrix entries are [re, im] pairs");
                hop.matrix(i / 2, i % 2) = cplx(m[i][0].get<double>(), m[i][1].get<double>());
            }
            hoppings.push_back(hop);
        }
        ModelSpec spec(dim, std::move(hoppings), model.value("name", "custom"));
        if (model.contains("lattice")) {
            auto const& lat = model["lattice"];
            allow_keys(lat, {"a1", "a2"}, "lattice");
            spec.set_primitive_vectors(vector2(lat.at("a1"), "a1"), vector2(lat.at("a2"), "a2"));
        }
        return spec;
    });
}

json model_to_json(ModelSpec const& model) {
    json hoppings = json::array();
    for (auto const& h : model.hoppings()) {
        json r = model.dimension() == 1 ? json::array({h.r[0]}) : json::array({h.r[0], h.r[1]});
        json m = json::array();
        for (int i = 0; i < 4; ++i)
            m.push_back(cplx_json(h.matrix(i / 2, i % 2)));
        hoppings.push_back({{"r", r}, {"matrix", m}});
    }
    auto const& [a1, a2] = model.primitive_vectors();
    return {{"dimension", model.dimension()},
            {"name", model.name()},
            {"lattice", {{"a1", {a1.x(), a1.y()}}, {"a2", {a2.x(), a2.y()}}}},
            {"hoppings", hoppings}};
}

json with_model_parameter(json const& model, std::string const& param, double value) {
    auto const* s = find_shortcut(model);
    if (!s)
        throw ValidationError("parameter sweeps need a built-in model shortcut");
    if (std::find(s->params.begin(), s->params.end(), param) == s->params.end())
        throw ValidationError("model " + std::string(s->name) + " has no parameter '" + param + "'");
    json out = canonical_model(model);
    out[s->name][param] = value;
    return out;
}

DissipatorSpec dissipator_from_json(json const& dissipator) {
    return guarded([&] { return parse_dissipator(dissipator); });
}

json dissipator_to_json(DissipatorSpec const& dissipator) {
    auto const& comps = dissipator.components();
    if (comps.size() == 1)
        return component_to_json(comps[0]);
    json parts = json::array();
    for (auto const& c : comps)
        parts.push_back(component_to_json(c));
    return {{"type", "mixture"}, {"components", parts}};
}

std::vector<std::string> const& experiment_kinds() {
    static std::vector<std::string> const kinds{"trajectories", "jumptime-map", "walltime", "topology",
                                                "steady-state", "fig2",         "verify"};
    return kinds;
}

ExperimentConfig config_from_json(json const& config) {
    return guarded([&] {
        allow_keys(config,
                   {"kind", "model", "dissipator", "trajectories", "n_max", "cells", "momentum_points", "base_seed",
                    "tolerances", "init", "times", "sweep", "v_over_w", "gammas", "transform_m", "curvature"},
                   "config");
        ExperimentConfig c;
        c.kind = config.value("kind", c.kind);
        auto const& kinds = experiment_kinds();
        if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end())
            throw ValidationError("unknown experiment kind '" + c.kind + "'");
        if (config.contains("model"))
            c.model = config["model"];
        c.model = canonical_model(c.model);
        if (config.contains("dissipator"))
            c.dissipator = dissipator_from_json(config["dissipator"]);

        c.trajectories = config.value("trajectories", c.trajectories);
        c.n_max = config.value("n_max", c.n_max);
        c.cells = config.value("cells", c.cells);
        c.momentum_points = config.value("momentum_points", c.momentum_points);
        c.base_seed = config.value("base_seed", c.base_seed);
        if (c.trajectories < 1)
            throw ValidationError("trajectories must be positive");
        if (c.n_max < 0 || c.n_max > 10)
            throw ValidationError("n_max must lie in [0, 10]");
        if (c.cells < 2)
            throw ValidationError("cells must be at least 2");
        if (c.momentum_points < 0)
            throw ValidationError("momentum_points must be non-negative");

        if (config.contains("tolerances")) {
            auto const& t = config["tolerances"];
            allow_keys(t, {"quadrature", "integrator", "seam"}, "tolerances");
            c.quadrature_tolerance = number_or(t, "quadrature", c.quadrature_tolerance, "tolerances");
            c.integrator_tolerance = number_or(t, "integrator", c.integrator_tolerance, "tolerances");
            c.seam_limit = number_or(t, "seam", c.seam_limit, "tolerances");
            if (!(c.quadrature_tolerance > 0) || !(c.integrator_tolerance > 0) || !(c.seam_limit > 0))
                throw ValidationError("tolerances must be positive");
        }
        if (config.contains("init")) {
            auto const& init = config["init"];
            allow_keys(init, {"cell", "sublattice"}, "init");
            if (init.contains("cell")) {
                auto const cell = init["cell"].get<std::vector<int>>();
                if (cell.empty() || cell.size() > 2)
                    throw ValidationError("init cell needs one or two entries");
                c.init_cell = {cell[0], cell.size() == 2 ? cell[1] : 0};
            }
            if (init.contains("sublattice"))
                c.init_sublattice = sublattice_from(init["sublattice"]);
        }
        c.times = config.value("times", c.times);
        if (!std::is_sorted(c.times.begin(), c.times.end()) ||
            std::any_of(c.times.begin(), c.times.end(), [](double t) { return t < 0; }))
            throw ValidationError("walltime sample times must be non-negative and ascending");
        if (config.contains("sweep")) {
            auto const& s = config["sweep"];
            allow_keys(s, {"parameter", "values"}, "sweep");
            c.sweep = SweepSpec{s.at("parameter").get<std::string>(), s.at("values").get<std::vector<double>>()};
            with_model_parameter(c.model, c.sweep->parameter, 1.0);
        }
        c.v_over_w = config.value("v_over_w", c.v_over_w);
        c.gammas = config.value("gammas", c.gammas);
        c.transform_m = config.value("transform_m", c.transform_m);
        c.curvature = config.value("curvature", c.curvature);
        return c;
    });
}

json config_to_json(ExperimentConfig const& c) {
    json out{{"kind", c.kind},
             {"model", canonical_model(c.model)},
             {"dissipator", dissipator_to_json(c.dissipator)},
             {"trajectories", c.trajectories},
             {"n_max", c.n_max},
             {"cells", c.cells},
             {"momentum_points", c.momentum_points},
             {"base_seed", c.base_seed},
             {"tolerances",
              {{"quadrature", c.quadrature_tolerance}, {"integrator", c.integrator_tolerance}, {"seam", c.seam_limit}}},
             {"init", {{"cell", {c.init_cell[0], c.init_cell[1]}}, {"sublattice", name(c.init_sublattice)}}},
             {"times", c.times},
             {"v_over_w", c.v_over_w},
             {"gammas", c.gammas},
             {"transform_m", c.transform_m},
             {"curvature", c.curvature}};
    if (c.sweep)
        out["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}};
    return out;
}

} // namespace jumptime
