"""Adaptive velocity and attitude controllers, projector and guidance.

Both loops are designed on the averaged reduced model: thrust and drag
through the reduced drag regressor, path angle through the reduced lift
regressor, and pitch through the wing-lift moment against the tail lift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .aero import lift_regressor, packed, stall_factor
from .errors import ArgumentError, ProjectorBreachError, TrimNotFoundError
from .params import AeroCoeffs, PlatformParams

__all__ = [
    "Gains",
    "VelocityAdaptiveState",
    "AttitudeAdaptiveState",
    "ControlReferences",
    "VelocityCommand",
    "AttitudeCommand",
    "eta",
    "trim_alpha",
    "eta_integral",
    "k1_upper_bound",
    "k1_interval",
    "k3_condition",
    "true_phi",
    "velocity_feedback",
    "velocity_adapt",
    "attitude_feedback",
    "attitude_adapt",
    "project",
    "guidance",
    "guidance_rate",
    "lyapunov_W",
    "lyapunov_W3",
    "epsilon_omega",
]

TRIM_BRACKET = (-0.2, math.radians(36.0))
TRIM_TOL = 1e-8
K_MAX = 1.98  # commanded reduced-frequency ceiling, inside the k < 2 model range


@dataclass(frozen=True)
class Gains:
    k0: float = 4.0
    gamma_V: tuple = (0.5, 0.2)  # diagonal of Gamma_V
    kG: float = 2.0
    c1: float = 3.0
    k3: float = 3.0
    k1: float = -0.2
    gamma_gamma: float = 0.05  # Gamma_gamma = gamma_gamma * I6
    eps: float = 0.2  # projector boundary-layer thickness
    gamma_proj: float = 0.01  # Gamma = gamma_proj * I6
    f_max: float = 8.0  # [Hz]
    delta_e_max: float = math.radians(45.0)

    def __post_init__(self):
        if not (self.k0 > 0 and self.c1 > 0 and self.k3 > 0 and self.kG >= 0):
            raise ArgumentError("k0, c1 and k3 must be positive and kG non-negative")
        if len(self.gamma_V) != 2 or min(self.gamma_V) < 0:
            raise ArgumentError("gamma_V must hold two non-negative entries")
        if self.gamma_gamma < 0 or not self.gamma_proj > 0:
            raise ArgumentError("adaptation gains must be non-negative (projector gain positive)")
        if not -1.0 < self.k1 < 0.0:
            raise ArgumentError(f"k1 must lie in (-1, 0), got {self.k1!r}")
        if not (self.f_max > 0 and self.delta_e_max > 0):
            raise ArgumentError("actuator limits must be positive")
        if self.eps < 0:
            raise ArgumentError("projector layer thickness must be non-negative")

    @property
    def Gamma_V(self) -> np.ndarray:
        return np.diag(self.gamma_V).astype(float)


@dataclass
class VelocityAdaptiveState:
    theta_hat: np.ndarray  # estimate of the (1, alpha^2) drag coefficients

    @classmethod
    def nominal(cls, coeffs: AeroCoeffs | None = None, scale: float = 1.0) -> "VelocityAdaptiveState":
        coeffs = coeffs or AeroCoeffs()
        return cls(scale * np.asarray(coeffs.drag_alpha, dtype=float))

    def copy(self) -> "VelocityAdaptiveState":
        return VelocityAdaptiveState(self.theta_hat.copy())


@dataclass
class AttitudeAdaptiveState:
    phi_hat: np.ndarray  # 6-vector

    @classmethod
    def nominal(cls, params=None, coeffs=None, scale: float = 1.0) -> "AttitudeAdaptiveState":
        return cls(scale * true_phi(params, coeffs))

    def copy(self) -> "AttitudeAdaptiveState":
        return AttitudeAdaptiveState(self.phi_hat.copy())


@dataclass(frozen=True)
class ControlReferences:
    V_R: float
    Vdot_R: float
    gamma_R: float
    gammadot_R: float
    x_R: float = 0.0
    z_R: float = 0.0
    q_R: float = 0.0  # pitch-rate reference


@dataclass(frozen=True)
class VelocityCommand:
    e: float
    C_T: float
    f: float
    saturated: bool
    terms: tuple  # (proportional, adaptive, gravity, feedforward)


@dataclass(frozen=True)
class AttitudeCommand:
    delta_e: float
    e1: float
    e2: float
    e2_tilde: float
    e3_tilde: float
    alpha_R: float
    psi: np.ndarray
    phi_psi: float
    saturated: bool
    terms: tuple  # (arcsin, pitch-rate, angle of attack)
    trim_ok: bool = True


# ---------------------------------------------------------------- trim


def eta(alpha, V, gammaR, gammadotR, k, params=None, coeffs=None) -> float:
    """Path-angle trim residual of the reduced lift model."""
    params = params or PlatformParams()
    coeffs = coeffs or AeroCoeffs()
    if not V > 0:
        raise ArgumentError(f"airspeed must be positive, got {V!r}")
    return kernels.eta(packed(params, coeffs), alpha, V, gammaR, gammadotR, k)


def trim_alpha(V, gammaR, gammadotR, k, params=None, coeffs=None, bracket=TRIM_BRACKET, tol=TRIM_TOL) -> float:
    """Bisection root of :func:`eta` (raises :class:`TrimNotFoundError`)."""
    params = params or PlatformParams()
    coeffs = coeffs or AeroCoeffs()
    if not V > 0:
        raise ArgumentError(f"airspeed must be positive, got {V!r}")
    return kernels.trim_alpha(packed(params, coeffs), V, gammaR, gammadotR, k, bracket[0], bracket[1], tol)


def _trim_or_edge(p, V, gammaR, gammadotR, k) -> tuple[float, bool]:
    lo, hi = TRIM_BRACKET
    try:
        return kernels.trim_alpha(p, V, gammaR, gammadotR, k, lo, hi, TRIM_TOL), True
    except TrimNotFoundError:
        # no balance inside the bracket: hold the edge closest to balance
        elo = abs(kernels.eta(p, lo, V, gammaR, gammadotR, k))
        ehi = abs(kernels.eta(p, hi, V, gammaR, gammadotR, k))
        return (lo if elo < ehi else hi), False


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def eta_integral(alpha_R, alpha, V, gammaR, gammadotR, k, params=None, coeffs=None) -> float:
    """Integral of eta from ``alpha_R`` to ``alpha`` (16-point Gauss-Legendre)."""
    params = params or PlatformParams()
    coeffs = coeffs or AeroCoeffs()
    p = packed(params, coeffs)
    half = 0.5 * (alpha - alpha_R)
    mid = 0.5 * (alpha + alpha_R)
    total = 0.0
    for xi, wi in zip(_GL_X, _GL_W):
        total += wi * kernels.eta(p, mid + half * xi, V, gammaR, gammadotR, k)
    return half * total


# ---------------------------------------------------------------- gain bounds


def k1_upper_bound(alphaR_min: float, k_min: float, e1_max: float, coeffs: AeroCoeffs | None = None) -> float:
    """Upper bound on ``1 + k1`` from the sign property of eta."""
    if not e1_max > 0:
        raise ArgumentError(f"e1_max must be positive, got {e1_max!r}")
    coeffs = coeffs or AeroCoeffs()
    _, th_a, th_a2, _, th_ak = coeffs.theta_Lw_red
    return (th_a + 2.0 * alphaR_min * th_a2 + k_min * th_ak) / (e1_max * th_a2)


def k1_interval(alphaR_min=0.18, k_min=0.64, e1_max=math.radians(60.0), coeffs=None) -> tuple[float, float]:
    """Admissible ``k1`` range ``(-1, bound - 1]``."""
    return -1.0, k1_upper_bound(alphaR_min, k_min, e1_max, coeffs) - 1.0


@dataclass(frozen=True)
class K3Check:
    k3_bar_xa: float  # derivation form, wing arm x_a
    k3_bar_xt: float  # tuning-summary form, tail arm x_t and cos(alpha) mu
    V: float

    @property
    def ok_xa(self) -> bool:
        return self.k3_bar_xa > 1.0

    @property
    def ok_xt(self) -> bool:
        return self.k3_bar_xt > 1.0


def k3_condition(k3: float, c1: float, V: float, params=None, alpha: float = 0.0, mu: float = 1.0) -> K3Check:
    """Both published forms of the ``k3_bar > 1`` sufficiency condition."""
    params = params or PlatformParams()
    base = V * V * params.beta2w * k3 / c1
    return K3Check(base * params.x_a, base * params.x_t * math.cos(alpha) * mu, V)


def epsilon_omega(params: PlatformParams | None = None) -> float:
    """Slow/fast ratio times flapping rate, ``I_y / (m c^2)``."""
    params = params or PlatformParams()
    return params.I_y / (params.m * params.c**2)


# ---------------------------------------------------------------- velocity


def velocity_feedback(V, gamma, alpha, refs: ControlReferences, adaptive: VelocityAdaptiveState, gains: Gains | None = None, params=None, coeffs=None) -> VelocityCommand:
    """Thrust demand ``C_T`` and the flapping frequency that realizes it."""
    gains = gains or Gains()
    params = params or PlatformParams()
    coeffs = coeffs or AeroCoeffs()
    if not V > 0:
        raise ArgumentError(f"airspeed must be positive, got {V!r}")
    qbar = params.beta1
    e = V - refs.V_R
    r = np.array([1.0, alpha * alpha])
    t_prop = -gains.k0 * e
    t_adapt = qbar * refs.V_R**2 * float(adaptive.theta_hat @ r)
    t_grav = params.g * math.sin(gamma)
    t_ff = refs.Vdot_R
    C_T = t_prop + t_adapt + t_grav + t_ff
    theta_k = coeffs.drag_k
    f4 = -C_T * V * V / (qbar * theta_k * (math.pi * params.c) ** 4)
    f = f4**0.25 if f4 > 0 else 0.0
    f_cap = min(gains.f_max, K_MAX * V / (math.pi * params.c))
    saturated = f4 <= 0 or f > f_cap
    f = min(f, f_cap)
    return VelocityCommand(e, C_T, f, saturated, (t_prop, t_adapt, t_grav, t_ff))


def velocity_adapt(e, alpha, refs: ControlReferences, adaptive: VelocityAdaptiveState, gains: Gains | None = None, params=None) -> np.ndarray:
    """Estimate rate ``-qbar V_R^2 e Gamma_V r``."""
    gains = gains or Gains()
    params = params or PlatformParams()
    r = np.array([1.0, alpha * alpha])
    return -params.beta1 * refs.V_R**2 * e * (gains.Gamma_V @ r)


# ---------------------------------------------------------------- attitude


def true_phi(params: PlatformParams | None = None, coeffs: AeroCoeffs | None = None) -> np.ndarray:
    """Lumped pitch parameters of the design model."""
    params = params or PlatformParams()
    coeffs = coeffs or AeroCoeffs()
    scale = params.beta2w * params.x_a / (params.beta2t * coeffs.theta_Lt[0])
    return scale * np.append(np.asarray(coeffs.theta_Lw_red, dtype=float), 1.0)


def attitude_feedback(state, k, refs: ControlReferences, adaptive: AttitudeAdaptiveState, gains: Gains | None = None, params=None, coeffs=None) -> AttitudeCommand:
    """Tail deflection from the adaptive backstepping law.

    ``state`` is a :class:`~perchkit.state.FlightState`; ``k`` the current
    reduced frequency used by the lift regressor.
    """
    gains = gains or Gains()
    params = params or PlatformParams()
    coeffs = coeffs or AeroCoeffs()
    V, alpha, q = state.V, state.alpha, state.q
    if not V > 0:
        raise ArgumentError(f"airspeed must be positive, got {V!r}")
    p = packed(params, coeffs)
    alpha_R, ok = _trim_or_edge(p, refs.V_R, refs.gamma_R, refs.gammadot_R, k)
    e1 = state.gamma - refs.gamma_R
    e2 = state.theta - (refs.gamma_R + alpha_R)
    e2t = e2 + gains.k1 * e1
    e3t = q - refs.q_R + gains.c1 * e1
    mu = stall_factor(alpha, coeffs)
    psi = np.empty(6)
    psi[:5] = mu * math.cos(alpha) * lift_regressor(alpha, k)
    psi[5] = gains.k3 * e3t
    s = float(adaptive.phi_hat @ psi)
    if not abs(s) <= 1.0:
        raise ProjectorBreachError(s)
    a_term = math.asin(s) / coeffs.theta_Lt[1]
    r_term = -params.x_t * q / V
    de = a_term + r_term - alpha
    saturated = abs(de) > gains.delta_e_max
    de = max(-gains.delta_e_max, min(gains.delta_e_max, de))
    return AttitudeCommand(de, e1, e2, e2t, e3t, alpha_R, psi, s, saturated, (a_term, r_term, -alpha), ok)


def attitude_adapt(V, e3_tilde, psi, gains: Gains | None = None, params=None, coeffs=None) -> np.ndarray:
    """Raw (pre-projection) estimate rate."""
    gains = gains or Gains()
    params = params or PlatformParams()
    coeffs = coeffs or AeroCoeffs()
    sgn = 1.0 if coeffs.theta_Lt[0] >= 0 else -1.0
    return gains.gamma_gamma * params.beta2t / gains.c1 * sgn * V * V * e3_tilde * np.asarray(psi, dtype=float)


def projector_value(phi_hat, psi, eps, params: PlatformParams | None = None) -> float:
    params = params or PlatformParams()
    return float(phi_hat @ psi) ** 2 - (params.S_t / params.S - eps) ** 2


def project(phi_hat, phi_hat_dot, psi, eps, Gamma, params: PlatformParams | None = None) -> np.ndarray:
    """Smooth projection of the estimate rate onto the admissible set.

    Inside the set (``P <= 0``) or for inward rates the input is returned.
    In the boundary layer the outward component along ``grad P`` (in the
    ``Gamma`` metric) is removed in proportion ``min(1, P/eps)``.
    """
    params = params or PlatformParams()
    ratio = params.S_t / params.S
    if not 0.0 <= eps <= ratio:
        raise ArgumentError(f"eps must lie in [0, {ratio:.4g}], got {eps!r}")
    phi_hat = np.asarray(phi_hat, dtype=float)
    phi_hat_dot = np.asarray(phi_hat_dot, dtype=float)
    psi = np.asarray(psi, dtype=float)
    Gamma = np.atleast_2d(np.asarray(Gamma, dtype=float))
    if Gamma.shape == (1, 1):
        Gamma = Gamma[0, 0] * np.eye(phi_hat.size)
    s = float(phi_hat @ psi)
    P = s * s - (ratio - eps) ** 2
    grad = 2.0 * s * psi
    if P <= 0.0 or float(grad @ phi_hat_dot) <= 0.0:
        return phi_hat_dot
    g_grad = Gamma @ grad
    norm = float(grad @ g_grad)
    if norm == 0.0:
        return phi_hat_dot
    weight = 1.0 if eps == 0.0 else min(1.0, P / eps)
    return phi_hat_dot - weight * g_grad * (float(grad @ phi_hat_dot) / norm)


# ---------------------------------------------------------------- guidance


@dataclass(frozen=True)
class GuidanceCommand:
    gamma_G: float
    e_G: float
    clamped: bool


def guidance(z, z_R, V, V_R, gamma_R, kG) -> GuidanceCommand:
    """Altitude-correcting path-angle command."""
    if not V > 0:
        raise ArgumentError(f"airspeed must be positive, got {V!r}")
    e_G = z - z_R
    arg = (V_R * math.sin(gamma_R) - kG * e_G) / V
    clamped = abs(arg) > 1.0
    return GuidanceCommand(math.asin(max(-1.0, min(1.0, arg))), e_G, clamped)


def guidance_rate(cmd: GuidanceCommand, V, gamma, V_R, Vdot_R, gamma_R, gammadot_R, kG) -> float:
    """Time derivative of the guidance path angle along the current motion.

    The reference altitude follows the path, so ``dz_R/dt = tan(gamma_R) dx/dt``;
    the airspeed rate is taken from the reference.
    """
    if cmd.clamped:
        return 0.0
    c = math.cos(cmd.gamma_G)
    if c <= 1e-9:
        return 0.0
    de_G = V * (math.sin(gamma) - math.tan(gamma_R) * math.cos(gamma))
    a = V_R * math.sin(gamma_R) - kG * cmd.e_G
    a_dot = Vdot_R * math.sin(gamma_R) + V_R * math.cos(gamma_R) * gammadot_R - kG * de_G
    return (a_dot - a * Vdot_R / V) / (V * c)


# ---------------------------------------------------------------- Lyapunov


def lyapunov_W(e, theta_hat, gains: Gains | None = None, coeffs=None) -> float:
    gains = gains or Gains()
    coeffs = coeffs or AeroCoeffs()
    err = np.asarray(coeffs.drag_alpha, dtype=float) - np.asarray(theta_hat, dtype=float)
    inv = np.array([1.0 / g if g > 0 else 0.0 for g in gains.gamma_V])
    return 0.5 * e * e + 0.5 * float(err @ (inv * err))


def lyapunov_W3(cmd: AttitudeCommand, state, refs: ControlReferences, k, phi_hat, gains: Gains | None = None, params=None, coeffs=None) -> float:
    gains = gains or Gains()
    params = params or PlatformParams()
    coeffs = coeffs or AeroCoeffs()
    err = true_phi(params, coeffs) - np.asarray(phi_hat, dtype=float)
    integral = eta_integral(cmd.alpha_R, state.alpha, state.V, refs.gamma_R, refs.gammadot_R, k, params, coeffs)
    w = 0.5 * gains.c1 * cmd.e1**2 + integral + cmd.e3_tilde**2 / (2.0 * gains.c1)
    if gains.gamma_gamma > 0:
        w += 0.5 * abs(coeffs.theta_Lt[0]) * float(err @ err) / gains.gamma_gamma
    return w
