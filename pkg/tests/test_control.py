import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from perchkit import ProjectorBreachError, control, kernels
from perchkit.aero import packed
from perchkit.params import AeroCoeffs, PlatformParams
from perchkit.state import FlightState

P = PlatformParams()
C = AeroCoeffs()
PK = packed(P, C)
G = control.Gains()


def design_derivative(s: FlightState, f, de):
    out = np.empty(6)
    kernels.derivative(PK, np.array(s.as_tuple()), f, de, 0.0, 1, kernels.DESIGN_AERO, 0.1, out)
    return out


@settings(max_examples=50, deadline=None)
@given(st.floats(4.0, 7.0), st.floats(-0.4, 0.4), st.floats(0.05, 0.35), st.floats(-0.3, 0.3), st.floats(-1, 1))
def test_velocity_loop_closes_exactly_on_design_plant(V_R, gamma, alpha, dV, Vdot_R):
    # with exact drag estimates: Vdot = Vdot_R - k0 e - beta1 (V^2 - V_R^2) theta.r
    V = V_R + dV
    refs = control.ControlReferences(V_R, Vdot_R, gamma, 0.0)
    th = control.VelocityAdaptiveState.nominal(C, 1.0)
    cmd = control.velocity_feedback(V, gamma, alpha, refs, th, G, P, C)
    if cmd.saturated:
        return
    s = FlightState(0, 0, gamma + alpha, V, gamma, 0.0)
    d = design_derivative(s, cmd.f, 0.0)
    r = np.array([1.0, alpha * alpha])
    theta = np.asarray(C.drag_alpha)
    expected = Vdot_R - G.k0 * cmd.e - P.beta1 * (V * V - V_R * V_R) * float(theta @ r)
    assert d[3] == pytest.approx(expected, abs=1e-9)


def test_nominal_velocity_estimate_is_reduced_drag():
    th = control.VelocityAdaptiveState.nominal(C, 1.0)
    np.testing.assert_array_equal(th.theta_hat, C.theta_Dw_red[:2])


@pytest.mark.parametrize("V,gamma,alpha,q,dg", [(5.0, -0.2, 0.2, 0.1, 0.02), (6.0, 0.1, 0.15, -0.2, -0.03),
                                                (4.0, 0.3, 0.3, 0.4, 0.0)])
def test_pitch_loop_identity_with_exact_estimates(V, gamma, alpha, q, dg):
    # exact lumped parameters cancel the wing moment: qdot = -V^2 beta2w x_a k3 e3~
    att = control.AttitudeAdaptiveState(control.true_phi(P, C))
    refs = control.ControlReferences(V, 0.0, gamma - dg, 0.0)
    s = FlightState(0, 0, gamma + alpha, V, gamma, q)
    k = 0.8
    f = k * V / (math.pi * P.c)
    cmd = control.attitude_feedback(s, k, refs, att, G, P, C)
    assert not cmd.saturated
    d = design_derivative(s, f, cmd.delta_e)
    assert d[5] == pytest.approx(-V * V * P.beta2w * P.x_a * G.k3 * cmd.e3_tilde, rel=1e-10, abs=1e-10)


def test_true_phi_scale():
    phi = control.true_phi(P, C)
    scale = (P.rho * P.S * P.x_a) / (P.rho * P.S_t * C.theta_Lt[0])
    assert phi[-1] == pytest.approx(scale)
    assert scale == pytest.approx(0.186, abs=1e-3)


def test_projector_breach_raised():
    att = control.AttitudeAdaptiveState(control.true_phi(P, C))
    s = FlightState(0, 0, 0.2, 5.0, 0.0, 40.0)  # huge pitch-rate error
    with pytest.raises(ProjectorBreachError):
        control.attitude_feedback(s, 0.8, control.ControlReferences(5.0, 0.0, 0.0, 0.0), att, G, P, C)


def test_projection_behaviour():
    psi = np.array([1.0, 0, 0, 0, 0, 0])
    bound = P.S_t / P.S - G.eps
    rate = np.array([1.0, 0.5, 0, 0, 0, 0])
    inside = np.array([0.5 * bound, 0, 0, 0, 0, 0])
    np.testing.assert_array_equal(control.project(inside, rate, psi, G.eps, 1.0, P), rate)
    # far outside: the outward component along psi is removed entirely
    outside = np.array([bound + 2 * G.eps, 0, 0, 0, 0, 0])
    out = control.project(outside, rate, psi, G.eps, 1.0, P)
    assert out[0] == pytest.approx(0.0) and out[1] == 0.5
    # inward rates pass untouched
    np.testing.assert_array_equal(control.project(outside, -rate, psi, G.eps, 1.0, P), -rate)
    with pytest.raises(Exception):
        control.project(inside, rate, psi, 1.0, 1.0, P)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=18, max_size=18), st.floats(0.0, 3.0))
def test_projection_never_pushes_outward_beyond_layer(v, push):
    # once P >= eps the projected rate has no outward component along grad P
    v = np.asarray(v)
    psi, rate = v[:6], v[6:12]
    bound = P.S_t / P.S - G.eps
    n = float(psi @ psi)
    if n < 1e-3:
        return
    phi = v[12:] + psi * ((bound + push * G.eps) - float(v[12:] @ psi)) / n
    P_val = control.projector_value(phi, psi, G.eps, P)
    out = control.project(phi, rate, psi, G.eps, 1.0, P)
    grad = 2.0 * float(phi @ psi) * psi
    raw, new = float(grad @ rate), float(grad @ out)
    if P_val >= G.eps:
        assert new <= 1e-9
    elif P_val > 0 and raw > 0:
        assert new == pytest.approx(raw * (1 - P_val / G.eps), abs=1e-9)


def test_guidance_rate_matches_finite_difference():
    V, gam, z, zR, VR, Vd, gR, gd, kG = 5.5, -0.15, 0.3, 0.1, 5.0, -1.0, -0.2, 0.8, G.kG

    def gG(h):
        V_h, VR_h = V + h * Vd, VR + h * Vd
        z_h = z + h * V * math.sin(gam)
        zR_h = zR + h * math.tan(gR) * V * math.cos(gam)
        return control.guidance(z_h, zR_h, V_h, VR_h, gR + h * gd, kG).gamma_G

    h = 1e-6
    fd = (gG(h) - gG(-h)) / (2 * h)
    cmd = control.guidance(z, zR, V, VR, gR, kG)
    assert control.guidance_rate(cmd, V, gam, VR, Vd, gR, gd, kG) == pytest.approx(fd, rel=1e-6)


def test_guidance_clamps():
    cmd = control.guidance(-10.0, 0.0, 2.0, 2.0, 0.0, 4.0)
    assert cmd.clamped and cmd.gamma_G == pytest.approx(math.pi / 2)


def test_gain_bounds_and_time_scale():
    assert control.k1_upper_bound(0.18, 0.64, math.radians(60)) == pytest.approx(0.8163, abs=1e-3)
    lo, hi = control.k1_interval()
    assert lo == -1.0 and hi < 0 and lo < G.k1 < hi
    assert control.epsilon_omega(P) == pytest.approx(P.I_y / (P.m * P.c**2))
    chk = control.k3_condition(G.k3, G.c1, 3.4647, P)
    assert chk.ok_xa and chk.k3_bar_xa == pytest.approx(3.4647**2 * P.beta2w * P.x_a * G.k3 / G.c1)


def test_trim_alpha_root():
    a = control.trim_alpha(6.0, -0.2, 0.0, 0.8, P, C)
    assert abs(control.eta(a, 6.0, -0.2, 0.0, 0.8, P, C)) < 1e-7


def test_lyapunov_W_zero_at_truth():
    assert control.lyapunov_W(0.0, C.theta_Dw_red[:2], G, C) == 0.0
    assert control.lyapunov_W(0.2, C.theta_Dw_red[:2], G, C) == pytest.approx(0.02)
