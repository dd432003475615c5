from dataclasses import replace

import numpy as np
import pytest

from perchkit import ArgumentError
from perchkit.control import Gains
from perchkit.dynamics import SimLog
from perchkit.params import AeroCoeffs
from perchkit.planner import ManeuverBoundary
from perchkit.sim import (
    SCENARIOS,
    averaging_gap,
    control_decomposition,
    regulation_run,
    robustness_sweep,
    run_closed_loop,
    scenario,
)

DESIGN = scenario("drogon-12", mode="averaged", design_plant=True)


@pytest.fixture(scope="module")
def design_run():
    return run_closed_loop(DESIGN)


def test_scenarios_feasible():
    for name in SCENARIOS:
        assert scenario(name).solution().VP > 0
    with pytest.raises(ArgumentError):
        scenario("nope")


def test_zero_length_maneuver_rejected():
    with pytest.raises(ArgumentError):
        ManeuverBoundary(-0.2, 6.0, 0.0, 0.0)


def test_design_plant_run_perches(design_run):
    log, m = design_run
    assert m.perched and m.estimates_bounded
    assert m.position_error < 0.2
    assert log["x"][-1] >= 12.0 > log["x"][-2]
    assert set(m.as_row()) >= {"status", "position_error", "speed_error"}


def test_deterministic(design_run):
    log, m = design_run
    log2, m2 = run_closed_loop(DESIGN)
    for c in log.names:
        np.testing.assert_array_equal(log[c], log2[c])
    assert m == m2


def test_decomposition_bookkeeping(design_run, tmp_path):
    log, _ = design_run
    d = control_decomposition(log, path=tmp_path / "dec.csv")
    total = d["CT_prop"] + d["CT_adapt"] + d["CT_grav"] + d["CT_ff"]
    np.testing.assert_allclose(total, d["C_T"], rtol=0, atol=1e-12)
    free = log["de_sat"] == 0
    de = d["de_arcsin"] + d["de_rate"] + d["de_alpha"]
    np.testing.assert_allclose(de[free], d["delta_e"][free], atol=1e-12)
    # the adaptive drag term dominates the thrust demand
    means = {k: np.mean(np.abs(d[k])) for k in ("CT_prop", "CT_adapt", "CT_grav", "CT_ff")}
    assert max(means, key=means.get) == "CT_adapt"
    assert set(SimLog.from_csv(tmp_path / "dec.csv").names) == set(d)
    with pytest.raises(ArgumentError):
        control_decomposition(SimLog({"t": np.zeros(2)}))


def test_frozen_velocity_estimate():
    sc = replace(DESIGN, gains=replace(Gains(), gamma_V=(0.0, 0.0)))
    log, _ = run_closed_loop(sc)
    assert np.all(log["theta_hat_0"] == log["theta_hat_0"][0])
    assert np.all(log["theta_hat_1"] == log["theta_hat_1"][0])


def test_gap_vanishes_without_flapping_amplitude():
    sc = replace(DESIGN, coeffs=AeroCoeffs(theta_Lw_check=(0.0,) * 7))
    gaps = averaging_gap(sc, (1.0, 2.0))
    assert all(g.gap == 0.0 for g in gaps)


def test_robustness_identity_and_structure(tmp_path):
    base_log, base = run_closed_loop(DESIGN)
    cells = robustness_sweep(DESIGN, init_scales=(1.0,), mass_scales=(1.1,), cg_offsets=(0.005,),
                             path=tmp_path / "rob.csv")
    assert [c.label for c in cells] == ["init x1", "mass x1.1", "cg +0.005 m"]
    assert cells[0].metrics == base
    assert all(c.metrics is not None and c.metrics.estimates_bounded for c in cells)
    assert len((tmp_path / "rob.csv").read_text().splitlines()) == 4


def test_regulation_run_euler_and_rk4():
    a = regulation_run(DESIGN, 5.0, -0.2, 0.5, integrator="euler")
    b = regulation_run(DESIGN, 5.0, -0.2, 0.5, integrator="rk4")
    assert len(a) == len(b)
    # both integrators converge to the same trajectory to O(dt)
    assert np.max(np.abs(a["V"] - b["V"])) < 1e-2
    assert abs(b["e"][-1]) < abs(b["e"][0])
    with pytest.raises(ArgumentError):
        regulation_run(DESIGN, 5.0, -0.2, 0.5, integrator="midpoint")


def test_full_model_run_reports_abort():
    log, m = run_closed_loop(scenario("drogon-12"))
    assert not m.perched and m.status.startswith("aborted")
    assert len(log) > 0
