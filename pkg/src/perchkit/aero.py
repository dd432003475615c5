"""Wing, tail and stall aerodynamics plus the assembled body-frame loads."""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .errors import ArgumentError, EnvelopeError, ModelRangeError
from .params import AeroCoeffs, PlatformParams, pack
from .state import ControlInputs, FlightState, ModelMode

__all__ = [
    "AeroLoads",
    "WingLoads",
    "ReducedScalars",
    "FidelityReport",
    "stall_factor",
    "wing_loads",
    "tail_loads",
    "total_forces",
    "reduced_wing_coeffs",
    "model_fidelity_report",
    "packed",
]


@functools.lru_cache(maxsize=64)
def packed(params: PlatformParams, coeffs: AeroCoeffs) -> np.ndarray:
    arr = pack(params, coeffs)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class WingLoads:
    L_w_t: float  # instantaneous lift
    L_w: float  # mean lift
    L_w_check: float  # flapping lift amplitude
    D_w: float
    M_w: float


@dataclass(frozen=True)
class AeroLoads:
    L_w: float  # instantaneous (time-dependent) wing lift
    D_w: float
    M_w: float
    L_t: float
    D_t: float
    M_t: float
    F_X: float
    F_Z: float
    F_M: float
    L_w_mean: float = 0.0
    L_w_check: float = 0.0
    L_b: float = 0.0
    D_b: float = 0.0


@dataclass(frozen=True)
class ReducedScalars:
    drag_alpha: float  # (1, a^2) part
    drag_k: float  # k^4 part
    lift: float  # pre-stall lift scalar

    @property
    def drag(self) -> float:
        return self.drag_alpha + self.drag_k


def stall_factor(alpha: float, coeffs: AeroCoeffs | None = None) -> float:
    """Stall attenuation ``cos(a1*alpha + a0)**3``.

    Raises :class:`EnvelopeError` when the cosine argument leaves
    ``(-pi/2, pi/2)``.
    """
    coeffs = coeffs or AeroCoeffs()
    arg = coeffs.theta_S[0] * alpha + coeffs.theta_S[1]
    if not -math.pi / 2 < arg < math.pi / 2:
        raise EnvelopeError(alpha)
    return math.cos(arg) ** 3


def wing_loads(
    V: float,
    alpha: float,
    k: float,
    f: float,
    t: float,
    params: PlatformParams | None = None,
    coeffs: AeroCoeffs | None = None,
) -> WingLoads:
    """Full-model wing loads at time ``t`` (flapping lift ``sin(2*pi*f*t)``)."""
    params = params or PlatformParams()
    coeffs = coeffs or AeroCoeffs()
    if not V > 0:
        raise ArgumentError(f"airspeed must be positive, got {V!r}")
    if not k < kernels.K_LIMIT:
        raise ModelRangeError(k)
    mu = stall_factor(alpha, coeffs)
    cl, clc, cd, cm = kernels.wing_full(packed(params, coeffs), alpha, k)
    q = params.dynamic_pressure(V)
    lw = q * cl * mu
    lwc = q * clc * mu
    return WingLoads(lw + lwc * math.sin(2 * math.pi * f * t), lw, lwc, q * cd, q * params.c * cm)


def tail_loads(
    V: float,
    alpha_t: float,
    delta_e: float,
    params: PlatformParams | None = None,
    coeffs: AeroCoeffs | None = None,
) -> tuple[float, float, float]:
    """Tail ``(L_t, D_t, M_t)`` from the sinusoidal tail-stall model."""
    params = params or PlatformParams()
    coeffs = coeffs or AeroCoeffs()
    if not V > 0:
        raise ArgumentError(f"airspeed must be positive, got {V!r}")
    qt = params.tail_dynamic_pressure(V)
    u = alpha_t + delta_e
    l1, l2 = coeffs.theta_Lt
    d0, d1, d2 = coeffs.theta_Dt
    m1, m2 = coeffs.theta_Mt
    return (
        qt * l1 * math.sin(l2 * u),
        qt * (d0 - d1 * math.cos(d2 * u)),
        qt * params.c_t * m1 * math.sin(m2 * u),
    )


def total_forces(
    state: FlightState,
    inputs: ControlInputs,
    t: float,
    params: PlatformParams | None = None,
    coeffs: AeroCoeffs | None = None,
    mode: ModelMode = ModelMode.FULL,
) -> AeroLoads:
    """Body-frame force components and pitch moment at time ``t``."""
    params = params or PlatformParams()
    coeffs = coeffs or AeroCoeffs()
    mode = ModelMode.parse(mode)
    if not state.V > 0:
        raise ArgumentError(f"airspeed must be positive, got {state.V!r}")
    out = np.empty(kernels.N_LOADS)
    kernels.loads(
        packed(params, coeffs),
        state.V,
        state.alpha,
        state.alpha_t(params),
        state.reduced_frequency(inputs.f, params),
        inputs.delta_e,
        math.sin(2 * math.pi * inputs.f * t),
        int(mode is ModelMode.AVERAGED),
        kernels.FULL_AERO,
        out,
    )
    lwt, lw, lwc, dw, mw, lt, dt, mt, fx, fz, fm, lb, db = (float(v) for v in out)
    return AeroLoads(lwt, dw, mw, lt, dt, mt, fx, fz, fm, L_w_mean=lw, L_w_check=lwc, L_b=lb, D_b=db)


def lift_regressor(alpha: float, k: float) -> np.ndarray:
    """Reduced lift regressor ``(1, a, a^2, k^2, a*k)``."""
    return np.array([1.0, alpha, alpha * alpha, k * k, alpha * k])


def drag_regressor(alpha: float) -> np.ndarray:
    """Drag (non-thrust) regressor ``(1, a^2)``."""
    return np.array([1.0, alpha * alpha])


def reduced_wing_coeffs(alpha: float, k: float, coeffs: AeroCoeffs | None = None) -> ReducedScalars:
    coeffs = coeffs or AeroCoeffs()
    if not k < kernels.K_LIMIT:
        raise ModelRangeError(k)
    stall_factor(alpha, coeffs)  # envelope guard only
    d0, d2, dk = coeffs.theta_Dw_red
    lift = float(np.dot(coeffs.theta_Lw_red, lift_regressor(alpha, k)))
    return ReducedScalars(d0 + d2 * alpha * alpha, dk * k**4, lift)


@dataclass(frozen=True)
class FidelityReport:
    lift_rmse: float
    drag_rmse: float
    lift_relative: float
    drag_relative: float
    n_points: int

    def rows(self):
        yield ("channel", "rmse", "relative_rmse", "n_points")
        yield ("lift", self.lift_rmse, self.lift_relative, self.n_points)
        yield ("drag", self.drag_rmse, self.drag_relative, self.n_points)


DEFAULT_FIDELITY_ALPHA = np.linspace(-0.2, 0.7, 91)
DEFAULT_FIDELITY_K = np.linspace(0.2, 1.8, 81)


def model_fidelity_report(
    alphas=None,
    ks=None,
    coeffs: AeroCoeffs | None = None,
    reduced: AeroCoeffs | None = None,
    path: str | Path | None = None,
) -> FidelityReport:
    """RMSE between full and reduced wing lift/drag scalars on an (alpha, k) grid.

    The relative figure divides the RMSE by the full model's range over the
    grid (zero range falls back to the absolute RMSE). Lift is compared before
    the stall factor, which both models share. ``reduced`` defaults to
    ``coeffs``; pass a different record to compare two identifications.
    """
    coeffs = coeffs or AeroCoeffs()
    reduced = reduced or coeffs
    alphas = DEFAULT_FIDELITY_ALPHA if alphas is None else np.atleast_1d(np.asarray(alphas, dtype=float))
    ks = DEFAULT_FIDELITY_K if ks is None else np.atleast_1d(np.asarray(ks, dtype=float))
    if alphas.size == 0 or ks.size == 0:
        raise ArgumentError("fidelity grid is empty")
    a, k = np.meshgrid(alphas, ks, indexing="ij")
    reg = np.stack([np.ones_like(a), a, k, a * a, k * k, a * k, k**3])
    lift_full = np.tensordot(np.asarray(coeffs.theta_Lw), reg, axes=1)
    drag_full = np.tensordot(np.asarray(coeffs.theta_Dw), reg, axes=1)
    l0, la, la2, lk2, lak = reduced.theta_Lw_red
    d0, d2, dk = reduced.theta_Dw_red
    lift_red = l0 + la * a + la2 * a * a + lk2 * k * k + lak * a * k
    drag_red = d0 + d2 * a * a + dk * k**4

    def _rel(full, red):
        rmse = float(np.sqrt(np.mean((full - red) ** 2)))
        span = float(full.max() - full.min())
        return rmse, (rmse / span if span > 0 else rmse)

    lr, lrel = _rel(lift_full, lift_red)
    dr, drel = _rel(drag_full, drag_red)
    report = FidelityReport(lr, dr, lrel, drel, int(a.size))
    if path is not None:
        with open(path, "w", newline="") as fh:
            csv.writer(fh).writerows(report.rows())
    return report
