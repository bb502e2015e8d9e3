#include <doctest.h>
#include <jumptime/config.hpp>
#include <jumptime/experiments.hpp>

using namespace jumptime;

TEST_CASE("config round trip is stable on the canonical form") {
    auto const raw = json::parse(R"({
        "kind": "topology",
        "model": {"torus2d": {"u": 6, "v": 10, "w": 1}},
        "dissipator": {"type": "mixture", "components": [
            {"type": "collective", "gamma": 0.5},
            {"type": "kick", "G": {"type": "gaussian", "sigma": 1.5}, "gamma": 0.5}]},
        "sweep": {"parameter": "u", "values": [2, 6, 14]},
        "tolerances": {"quadrature": 1e-9},
        "init": {"cell": [3], "sublattice": "B"}
    })");
    auto const once = config_to_json(config_from_json(raw));
    auto const twice = config_to_json(config_from_json(once));
    CHECK(once == twice);
    CHECK(once.dump() == twice.dump());
    CHECK(once["dissipator"]["components"].size() == 2);
    CHECK(once["init"]["sublattice"] == "B");
}

TEST_CASE("explicit hopping models round trip") {
    auto const ssh = models::ssh(0.2, 0.5);
    auto const j = model_to_json(ssh);
    auto const back = model_from_json(j);
    CHECK(model_to_json(back) == j);
    auto const a = bloch_vector(back, {0.9, 0});
    auto const b = bloch_vector(ssh, {0.9, 0});
    CHECK(a.hx == doctest::Approx(b.hx));
    CHECK(a.hy == doctest::Approx(b.hy));
    CHECK(canonical_model(j) == j);
}

TEST_CASE("dissipators parse") {
    auto const d = dissipator_from_json(json::parse(R"({"type": "kick", "G": {"type": "uniform"}, "gamma": 2})"));
    REQUIRE(d.components().size() == 1);
    CHECK(d.components()[0].kind == ChannelKind::Kick);
    CHECK(d.components()[0].kick.shape == KickShape::Uniform);
    CHECK(d.total_rate() == doctest::Approx(2.0));
    auto const b = dissipator_from_json(json::parse(R"({"type": "sublattice_B"})"));
    CHECK(b.components()[0].target == Sublattice::B);
    CHECK(dissipator_from_json(dissipator_to_json(b)).label() == b.label());
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"kind": "nope"})")), ValidationError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"trajectoriez": 3})")), ValidationError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"model": {"ssh": {"v": 1}}})")), ValidationError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"model": {"ssh": {"v": "x", "w": 1}}})")), ValidationError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"dissipator": {"type": "collective", "gamma": 0}})")),
                    ValidationError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"n_max": 11})")), ValidationError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"sweep": {"parameter": "q", "values": [1]}})")),
                    ValidationError);
    CHECK_THROWS_AS(model_from_json(json::parse(R"({"dimension": 1, "hoppings": [{"r": [1], "matrix": [[0,0],[1,0],[0,0],[0,0]]}]})")),
                    ValidationError);
}

TEST_CASE("csv output") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3) == "0.3333333333333333");
    CsvTable t{{"a", "b"}, {}};
    t.add({"1", "x,y"});
    CHECK(t.str() == "a,b\n1,\"x,y\"\n");
    CHECK_THROWS_AS(t.add({"1"}), Error);
}

TEST_CASE("topology experiment with a sweep") {
    auto c = config_from_json(json::parse(R"({
        "kind": "topology", "model": {"ssh": {"v": 0.2, "w": 1}},
        "sweep": {"parameter": "v", "values": [0.5, 1.0, 2.0]}})"));
    auto const out = run_experiment(c, "hash");
    CHECK(out.status == 0);
    REQUIRE(out.files.size() == 2);
    CHECK(out.files[1].name == "topology_sweep.csv");
    CHECK(out.files[1].content.find("\n1,nan") != std::string::npos);
    auto const report = json::parse(out.files[0].content);
    CHECK(report["axes"][0]["phase"]["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("dark contact in a topology run") {
    auto c = config_from_json(json::parse(R"({"kind": "topology", "model": {"ssh": {"v": 1, "w": 1}}})"));
    CHECK_THROWS_AS(run_experiment(c, "hash"), DomainError);
}
