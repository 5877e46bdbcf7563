import math

import numpy as np
import pytest

import confbound


def test_catalog_and_commands():
    names = confbound.catalog_names()
    assert "hemisphere" in names and "hyperbolic-ball" in names
    assert "invariants" in confbound.command_names()
    assert confbound.__version__


def test_model_attributes():
    m = confbound.load_model("hemisphere")
    assert m.chi == 1
    assert m.is_einstein
    assert len(m.faces) == 1
    lo, hi = m.domain
    x = [0.5 * (a + b) for a, b in zip(lo, hi)]
    g = m.metric(x)
    assert g.shape == (4, 4)
    assert np.allclose(g, g.T)


def test_round_sphere_curvature():
    m = confbound.load_model("round-s4")
    lo, hi = m.domain
    x = [a + 0.37 * (b - a) for a, b in zip(lo, hi)]
    c = confbound.curvature(m, x)
    assert c.scalar == pytest.approx(12.0, abs=1e-10)
    assert c.weyl_norm_sq == pytest.approx(0.0, abs=1e-10)
    assert np.abs(confbound.bach(m, x)).max() < 1e-8


def test_hemisphere_invariants():
    r = confbound.invariants(confbound.load_model("hemisphere"))
    assert r.E == pytest.approx(2 * math.pi**2, rel=1e-5)
    assert abs(r.beta_b) < 1e-12
    assert abs(r.cgb_residual) < 1e-5 * 8 * math.pi**2


def test_run_matches_cli_report():
    report = confbound.run("cgb", "flat-ball", quad_order=16)
    assert report["command"] == "cgb"
    assert report["model"] == "flat-ball"
    assert report["passed"] is True
    text, failed = confbound.run_command("cgb", "flat-ball", quad_order=16)
    assert not failed
    assert text == confbound.run_command("cgb", "flat-ball", quad_order=16)[0]


def test_errors():
    with pytest.raises(confbound.Error):
        confbound.load_model("no-such-model")
    with pytest.raises(confbound.Error):
        confbound.parse_model_json("{not json")
    with pytest.raises(ValueError):
        confbound.run("no-such-command", "hemisphere")
