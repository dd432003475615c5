import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from perchkit import EnvelopeError, ModelRangeError
from perchkit.aero import (
    model_fidelity_report,
    reduced_wing_coeffs,
    stall_factor,
    tail_loads,
    total_forces,
    wing_loads,
)
from perchkit.params import AeroCoeffs, PlatformParams
from perchkit.state import ControlInputs, FlightState, ModelMode

P = PlatformParams()
C = AeroCoeffs()


def regressor(a, k):
    return np.array([1.0, a, k, a * a, k * k, a * k, k**3])


def test_stall_factor_value_and_envelope():
    assert stall_factor(0.3) == pytest.approx(math.cos(1.35 * 0.3 - 0.3) ** 3)
    with pytest.raises(EnvelopeError):
        stall_factor(1.5)


def test_reduced_lift_scalar():
    # direct evaluation of (1, a, a^2, k^2, a*k) against the reduced vector
    a, k = 0.177, 0.64
    expected = float(np.dot(C.theta_Lw_red, [1, a, a * a, k * k, a * k]))
    assert reduced_wing_coeffs(a, k).lift == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(0.68167, abs=5e-5)


@settings(max_examples=60, deadline=None)
@given(st.floats(-0.2, 0.7), st.floats(0.1, 1.9), st.floats(1.0, 9.0), st.floats(0.0, 1.0))
def test_wing_loads_match_regressor_form(a, k, V, t):
    f = 5.0
    w = wing_loads(V, a, k, f, t)
    q = 0.5 * P.rho * V * V * P.S
    mu = math.cos(1.35 * a - 0.3) ** 3
    r = regressor(a, k)
    lw = q * mu * np.dot(C.theta_Lw, r)
    lwc = q * mu * np.dot(C.theta_Lw_check, r)
    assert w.L_w == pytest.approx(lw, rel=1e-12, abs=1e-12)
    assert w.L_w_t == pytest.approx(lw + lwc * math.sin(2 * math.pi * f * t), rel=1e-12, abs=1e-9)
    assert w.D_w == pytest.approx(q * np.dot(C.theta_Dw, r), rel=1e-12, abs=1e-12)
    assert w.M_w == pytest.approx(q * P.c * np.dot(C.theta_Mw, r[:6]), rel=1e-12, abs=1e-12)


def test_tail_loads_formula():
    V, at, de = 5.0, 0.1, -0.3
    qt = 0.5 * P.rho * V * V * P.S_t
    u = at + de
    lt, dt, mt = tail_loads(V, at, de)
    assert lt == pytest.approx(qt * 0.94 * math.sin(2.92 * u))
    assert dt == pytest.approx(qt * (0.36 - 0.32 * math.cos(4.23 * u)))
    assert mt == pytest.approx(qt * P.c_t * -0.65 * math.sin(2.26 * u))


def test_force_assembly():
    s = FlightState(0, 0, 0.25, 5.0, -0.05, 0.4)
    u = ControlInputs(5.0, -0.2)
    L = total_forces(s, u, 0.013, mode=ModelMode.FULL)
    a = s.alpha
    at = a + P.x_t * s.q / s.V
    da = at - a
    assert L.F_X == pytest.approx(-L.D_w + L.L_t * math.sin(da) - L.D_t * math.cos(da))
    assert L.F_Z == pytest.approx(L.L_w + L.L_t * math.cos(da) + L.D_t * math.sin(da))
    fm = (L.L_w * P.x_a * math.cos(a) + L.D_w * P.x_a * math.sin(a) + L.M_w
          - L.L_t * P.x_t * math.cos(at) - L.D_t * P.x_t * math.sin(at) + L.M_t)
    assert L.F_M == pytest.approx(fm)


def test_zero_coefficients_zero_forces():
    s = FlightState(0, 0, 0.2, 5.0, 0.0, 0.1)
    L = total_forces(s, ControlInputs(4.0, 0.1), 0.0, coeffs=AeroCoeffs.zeros())
    assert (L.F_X, L.F_Z, L.F_M) == (0.0, 0.0, 0.0)


def test_averaged_mode_drops_flapping_lift():
    s = FlightState(0, 0, 0.2, 5.0, 0.0, 0.0)
    u = ControlInputs(5.0, 0.0)
    full = total_forces(s, u, 0.05, mode="full")
    avg = total_forces(s, u, 0.05, mode="averaged")
    assert avg.L_w == pytest.approx(full.L_w_mean)
    assert full.L_w != pytest.approx(avg.L_w)


def test_model_range_guard():
    with pytest.raises(ModelRangeError):
        wing_loads(1.0, 0.1, 2.5, 5.0, 0.0)


def test_fidelity_report_and_identity(tmp_path):
    rep = model_fidelity_report(path=tmp_path / "fid.csv")
    assert rep.lift_relative < 0.05 and rep.drag_relative < 0.05
    assert (tmp_path / "fid.csv").read_text().startswith("channel")
    # a reduced model that equals the full one gives zero error
    same = AeroCoeffs(theta_Lw=(0.1, 2.0, 0.0, 7.0, -0.2, 2.0, 0.0), theta_Lw_red=(0.1, 2.0, 7.0, -0.2, 2.0),
                      theta_Dw=(2.0, 0.0, 0.0, 7.0, 0.0, 0.0, 0.0), theta_Dw_red=(2.0, 7.0, 0.0))
    rep0 = model_fidelity_report(coeffs=same, ks=[0.5, 1.0])
    assert rep0.lift_rmse == pytest.approx(0.0, abs=1e-12)
