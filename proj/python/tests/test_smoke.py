import json
import math

import pytest

import jumptime as jt


def test_ssh_phase_follows_the_winding():
    d = jt.Dissipator.collective()
    assert jt.jumptime_phase(jt.Model.ssh(0.2, 0.5), d) == pytest.approx(1.0, abs=1e-8)
    assert jt.jumptime_phase(jt.Model.ssh(0.5, 0.2), d) == pytest.approx(0.0, abs=1e-8)
    assert jt.winding_number(jt.Model.ssh(0.2, 0.5)) == pytest.approx(1.0, abs=1e-10)


def test_dark_contact_raises():
    with pytest.raises(jt.DomainError):
        jt.jumptime_phase(jt.Model.ssh(1.0, 1.0), jt.Dissipator.collective())
    assert issubclass(jt.DomainError, jt.Error)


def test_kernel_diagonal_is_one():
    m = jt.Model.ssh(0.3, 0.7)
    assert abs(jt.k_cc(m, [0.4], [0.4]) - 1) < 1e-12
    mix = jt.Dissipator.mixture([jt.Dissipator.collective(rate=0.5), jt.Dissipator.sublattice(jt.Sublattice.B, 0.5)])
    assert abs(jt.kernel(m, mix, [1.0], [1.0]) - 1) < 1e-12


def test_model_json_round_trip():
    m = jt.Model.torus2d(6, 10, 1)
    again = jt.Model.from_json(m.to_json())
    assert again.dimension == 2
    assert again.bloch_vector([0.3, 0.2]) == pytest.approx(m.bloch_vector([0.3, 0.2]))
    with pytest.raises(jt.ValidationError):
        jt.Model.from_json('{"ssh": {"v": 1}}')


def test_simulation_and_map():
    m, d = jt.Model.ssh(0.2, 0.5), jt.Dissipator.collective()
    out = jt.simulate(m, d, trajectories=100, n_max=2, cells=32)
    assert len(out["mean_x"]) == 3
    assert out["trapped"] == 0
    x = jt.jumptime_map_positions(m, d, cells=16, steps=2)
    assert x[1] == pytest.approx(1.0, abs=0.1)


def test_steady_state():
    r = jt.bloch_steady_state(jt.Model.ssh(0.4, 0.4), 1.0, [math.pi])
    assert r[2] == pytest.approx(1.0)
    assert jt.ssh_steady_current(1.0, 10.0, 0.01) == pytest.approx(0.005, rel=0.01)


def test_experiment_and_canonical_config():
    cfg = json.dumps({"kind": "topology", "model": {"ssh": {"v": 0.2, "w": 0.5}}, "curvature": False})
    assert jt.canonical_config(jt.canonical_config(cfg)) == jt.canonical_config(cfg)
    out = jt.run_experiment(cfg)
    assert out["status"] == 0
    report = json.loads(out["files"]["topology.json"])
    assert report["axes"][0]["phase"]["value"] == pytest.approx(1.0, abs=1e-8)
