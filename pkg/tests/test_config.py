import math

import pytest
from hypothesis import given, settings, strategies as st

from perchkit import ArgumentError
from perchkit.config import SCHEMA, dump_config, load_config, parse_config


def test_defaults():
    cfg = parse_config({})
    assert cfg.gain_set().k3 == 3.0
    assert cfg.feasibility().VP_min == pytest.approx(3.4647, abs=1e-4)
    assert cfg.mode().value == "full"


def test_degree_keys_convert():
    cfg = parse_config({"gains.delta_e_max_deg": 30.0, "limits.gammaP_mec_deg": [15.0, 50.0],
                        "scenario.mine.gamma0_deg": -10.0, "scenario.mine.V0": 5.0,
                        "scenario.mine.xP": 8.0, "scenario.mine.zP": 0.5})
    assert cfg.gain_set().delta_e_max == pytest.approx(math.radians(30.0))
    assert cfg.feasibility().gammaP_mec_range == pytest.approx((math.radians(15), math.radians(50)))
    sc = cfg.scenario("mine")
    assert sc.boundary.gamma0 == pytest.approx(math.radians(-10.0))
    assert "mine" in cfg.scenario_names()


def test_limit_overrides_and_sim_section():
    cfg = parse_config({"limits.VP_min": 4.0, "sim.mode": "averaged", "sim.design_plant": True, "sim.dt": 1e-3})
    assert cfg.feasibility().VP_min == 4.0
    sc = cfg.scenario("drogon-12")
    assert sc.mode.value == "averaged" and sc.design_plant and sc.dt == 1e-3
    assert cfg.scenario("drogon-12", mode="full").mode.value == "full"


@pytest.mark.parametrize("flat", [
    {"gains.nope": 1.0},
    {"bogus": 1},
    {"gains.k0": "fast"},
    {"sim.design_plant": 1},
    {"sim.mode": "quantum"},
    {"params.m": -1.0},
    {"run": ["drogon-99"]},
    {"preset": "unknown"},
    {"scenario.x.V0": 5.0},  # incomplete new scenario
])
def test_rejects_bad_input(flat):
    with pytest.raises(ArgumentError):
        parse_config(flat)


def test_load_errors(tmp_path):
    with pytest.raises(ArgumentError):
        load_config(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("a: [1, 2\n")
    with pytest.raises(ArgumentError):
        load_config(bad)
    assert load_config(None).preset == "eflap"


numbers = st.floats(0.5, 50.0, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(k0=numbers, kG=numbers, dt=st.floats(1e-4, 1e-2), de=st.floats(5.0, 60.0), m=st.floats(0.3, 2.0),
       design=st.booleans(), mode=st.sampled_from(["full", "averaged"]))
def test_roundtrip(tmp_path_factory, k0, kG, dt, de, m, design, mode):
    flat = {"gains.k0": k0, "gains.kG": kG, "gains.delta_e_max_deg": de, "params.m": m,
            "sim.dt": dt, "sim.design_plant": design, "sim.mode": mode, "run": ["drogon-9"]}
    cfg = parse_config(flat)
    path = tmp_path_factory.mktemp("cfg") / "c.yaml"
    dump_config(cfg, path)
    back = load_config(path)
    assert back == cfg
    assert back.to_flat() == {"preset": "eflap", **flat}


def test_schema_covers_sections():
    assert set(SCHEMA) == {"params", "coeffs", "gains", "limits", "sim", "scenario"}
    assert "delta_e_max_deg" in SCHEMA["gains"] and "gamma0_deg" in SCHEMA["scenario"]
