"""Minimal-velocity perching maneuver: kinematics, limits, optimizer, references.

The maneuver is a straight descent at constant path angle and constant
deceleration, followed by a vertical turn at constant speed and constant
turn rate. Perch coordinates are relative to the start point.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .errors import ArgumentError, DegenerateGeometryError
from .params import PlatformParams

__all__ = [
    "ManeuverBoundary",
    "FeasibilityLimits",
    "FeasibilityConfig",
    "PerchSolution",
    "ReferenceTrajectory",
    "RefPoint",
    "mean_geometry",
    "maneuver_accels",
    "endpoint_from_params",
    "feasibility_limits",
    "case1_interval",
    "solve_case1",
    "solve_boundary_cases",
    "solve_case6",
    "case6_quartic",
    "solve_optimal",
    "kkt_residuals",
    "reference_trajectory",
    "region_map",
    "brute_force_optimum",
]

_GEOM_EPS = 1e-12


@dataclass(frozen=True)
class ManeuverBoundary:
    gamma0: float  # initial path angle [rad], negative
    V0: float  # initial speed [m/s]
    xP: float  # perch position relative to start [m]
    zP: float

    def __post_init__(self):
        if not self.V0 > 0:
            raise ArgumentError(f"V0 must be positive, got {self.V0!r}")
        if not self.gamma0 < 0:
            raise ArgumentError(f"gamma0 must be negative, got {self.gamma0!r}")
        if not self.xP > 0:
            raise ArgumentError(f"xP must be positive (perch ahead of start), got {self.xP!r}")


@dataclass(frozen=True)
class FeasibilityConfig:
    """Inputs of the F1-F5 feasibility limits."""

    CL_max: float = 3.45
    alpha_s: float = math.radians(36.0)
    CD_max: float = 2.95
    gamma_min: float = math.radians(-37.0)
    stall_margin: float = 1.3  # V_P^min = margin * V_s
    decel_safety: float = 0.8  # applied to the critical deceleration at V_s
    turn_safety: float = 1.0  # applied to the critical turn rate at V_P^min
    gammaP_mec: tuple = (math.radians(10.0), math.radians(60.0))


@dataclass(frozen=True)
class FeasibilityLimits:
    VP_min: float
    VdotD_min: float  # negative
    gammadotT_max: float
    gammaP_mec_range: tuple
    V_s: float = float("nan")

    def __post_init__(self):
        if not self.VdotD_min < 0:
            raise ArgumentError("VdotD_min must be negative")
        if not (self.gammadotT_max > 0 and self.VP_min > 0):
            raise ArgumentError("gammadotT_max and VP_min must be positive")
        lo, hi = self.gammaP_mec_range
        if not lo < hi:
            raise ArgumentError("mechanical perching range is degenerate")

    @staticmethod
    def gammaP_kin_range(boundary: ManeuverBoundary) -> tuple[float, float]:
        r = math.atan2(boundary.zP, boundary.xP)
        return 2.0 * r - boundary.gamma0, r + math.pi

    def gammaP_range(self, boundary: ManeuverBoundary) -> tuple[float, float] | None:
        """Intersection of kinematic and mechanical ranges, ``None`` if empty."""
        klo, khi = self.gammaP_kin_range(boundary)
        lo = max(klo, self.gammaP_mec_range[0])
        hi = min(khi, self.gammaP_mec_range[1])
        return (lo, hi) if lo < hi else None


# inactive multipliers (1-based) and active slacks per case
CASE_PATTERNS = {
    1: ((1, 2, 3, 4, 5, 6), (5,)),
    2: ((3, 5, 7), (2, 4)),
    3: ((3, 6, 7), (2, 3)),
    4: ((4, 5, 7), (1, 4)),
    5: ((4, 6, 7), (1, 3)),
    6: ((5, 6, 7), (1, 2)),
}


@dataclass(frozen=True)
class PerchSolution:
    gammaP: float
    VP: float
    VdotD: float
    gammadotT: float
    case: int
    multipliers: tuple = field(default=(0.0,) * 7)
    slacks: tuple = field(default=(0.0,) * 5)
    T_P: float = float("nan")

    def params(self) -> tuple[float, float, float, float]:
        return self.gammaP, self.VP, self.VdotD, self.gammadotT


# ---------------------------------------------------------------- geometry


def mean_geometry(gamma0: float, gammaP: float, xP: float, zP: float) -> tuple[float, float, float]:
    """Mean attitude, characteristic length and turn radius ``(gammaM, L_M, R_T)``."""
    ds = math.sin(gammaP) - math.sin(gamma0)
    if abs(gammaP - gamma0) < 1e-9 or abs(ds) < _GEOM_EPS:
        raise DegenerateGeometryError(f"gammaP={gammaP!r} too close to gamma0={gamma0!r}")
    tan_m = -(math.cos(gammaP) - math.cos(gamma0)) / ds
    gammaM = math.atan(tan_m)
    dt = tan_m - math.tan(gamma0)
    if abs(dt) < _GEOM_EPS:
        raise DegenerateGeometryError("tan(gammaM) equals tan(gamma0)")
    L_M = (xP * tan_m - zP) / (math.cos(gamma0) * dt)
    R_T = (zP - xP * math.tan(gamma0)) / (ds * dt)
    return gammaM, L_M, R_T


def maneuver_accels(boundary: ManeuverBoundary, gammaP: float, VP: float) -> tuple[float, float]:
    """Descent deceleration and turn rate placing the perch at ``(xP, zP)``."""
    _, L_M, R_T = mean_geometry(boundary.gamma0, gammaP, boundary.xP, boundary.zP)
    if L_M == 0 or R_T == 0:
        raise DegenerateGeometryError("zero characteristic length or turn radius")
    return (VP * VP - boundary.V0**2) / (2.0 * L_M), VP / R_T


def endpoint_from_params(boundary: ManeuverBoundary, solution) -> tuple[float, float, float]:
    """Forward kinematics of the two phases: ``(xP, zP, T_P)``."""
    gammaP, VP, VdotD, gammadotT = _unpack(solution)
    if VdotD == 0 or gammadotT == 0:
        raise DegenerateGeometryError("zero deceleration or turn rate")
    g0, V0 = boundary.gamma0, boundary.V0
    dv2 = (VP * VP - V0 * V0) / (2.0 * VdotD)
    xP = math.cos(g0) * dv2 + (math.sin(gammaP) - math.sin(g0)) / gammadotT * VP
    zP = math.sin(g0) * dv2 - (math.cos(gammaP) - math.cos(g0)) / gammadotT * VP
    T_P = (VP - V0) / VdotD + (gammaP - g0) / gammadotT
    return xP, zP, T_P


def _unpack(solution):
    if isinstance(solution, PerchSolution):
        return solution.params()
    return tuple(float(v) for v in solution)


# ---------------------------------------------------------------- limits


def feasibility_limits(params: PlatformParams | None = None, coeffs=None, config: FeasibilityConfig | None = None):
    """F1-F3 numbers and the F5 mechanical range.

    F2 evaluates the velocity equation with full drag coefficient on the
    steepest glide at the stall speed; F3 evaluates the path-angle equation
    with maximum lift in level flight at the minimum perch speed. ``coeffs``
    is accepted for interface symmetry; the limits use the lumped
    coefficients in ``config``.
    """
    params = params or PlatformParams()
    config = config or FeasibilityConfig()
    if not config.CL_max > 0:
        raise ArgumentError(f"CL_max must be positive, got {config.CL_max!r}")
    if not config.CD_max > 0:
        raise ArgumentError(f"CD_max must be positive, got {config.CD_max!r}")
    m, g, rho, S = params.m, params.g, params.rho, params.S
    V_s = math.sqrt(2.0 * m * g / (rho * S * config.CL_max))
    VP_min = config.stall_margin * V_s
    vdot_crit = -rho * V_s**2 * S * config.CD_max / (2.0 * m) - g * math.sin(config.gamma_min)
    gdot_crit = rho * VP_min * S * config.CL_max / (2.0 * m) - g / VP_min
    return FeasibilityLimits(
        VP_min=VP_min,
        VdotD_min=config.decel_safety * vdot_crit,
        gammadotT_max=config.turn_safety * gdot_crit,
        gammaP_mec_range=tuple(config.gammaP_mec),
        V_s=V_s,
    )


# ---------------------------------------------------------------- cases


def _constraints_ok(boundary, limits, gammaP, VP, VdotD, gammadotT, tol=1e-9) -> bool:
    rng = limits.gammaP_range(boundary)
    if rng is None:
        return False
    lo, hi = rng
    scale = 1.0 + abs(limits.VdotD_min) + limits.gammadotT_max + limits.VP_min
    t = tol * scale
    return (
        VdotD >= limits.VdotD_min - t
        and gammadotT <= limits.gammadotT_max + t
        and gammadotT > 0
        and lo - t <= gammaP <= hi + t
        and VP >= limits.VP_min - t
    )


def _build(boundary, limits, case, gammaP, VP, VdotD, gammadotT) -> PerchSolution:
    sol = PerchSolution(gammaP, VP, VdotD, gammadotT, case)
    lam = _multipliers(boundary, limits, sol)
    sig = _slacks(boundary, limits, sol)
    _, _, T_P = endpoint_from_params(boundary, sol)
    return replace(sol, multipliers=lam, slacks=sig, T_P=T_P)


def case1_interval(boundary: ManeuverBoundary, limits: FeasibilityLimits) -> tuple[float, float] | None:
    """Open interval of perch angles reachable at the minimum perch speed."""
    rng = limits.gammaP_range(boundary)
    if rng is None:
        return None
    g0, V0, xP, zP = boundary.gamma0, boundary.V0, boundary.xP, boundary.zP
    VPm = limits.VP_min
    t0 = math.tan(g0)
    r = zP / xP
    lo, hi = rng
    # deceleration bound: (tan gM - tan g0) <= Xi (tan gM - zP/xP)
    dv2 = VPm * VPm - V0 * V0
    if dv2 != 0.0:
        xi = 2.0 * xP * limits.VdotD_min / (dv2 * math.cos(g0))
        if xi > 1.0:
            lo = max(lo, 2.0 * math.atan((t0 - xi * r) / (1.0 - xi)) - g0)
        elif 0.0 < xi < 1.0:
            # inequality flips: tan gM <= (tan g0 - Xi r)/(1 - Xi)
            hi = min(hi, 2.0 * math.atan((t0 - xi * r) / (1.0 - xi)) - g0)
        elif xi == 1.0:
            if not t0 >= r:
                return None
        # xi <= 0: accelerating to VP_min, the bound never binds
    # turn-rate bound: sin^2((gP - g0)/2) <= gdot_max cos g0 (zP - xP tan g0) / (2 VP_min)
    arg = limits.gammadotT_max * math.cos(g0) * (zP - xP * t0) / (2.0 * VPm)
    if arg <= 0.0:
        return None
    if arg < 1.0:
        hi = min(hi, 2.0 * math.asin(math.sqrt(arg)) + g0)
    return (lo, hi) if lo < hi else None


def solve_case1(boundary: ManeuverBoundary, limits: FeasibilityLimits, strategy: str = "midpoint") -> Optional[PerchSolution]:
    """Absolute minimum ``VP = VP_min`` when its perch-angle interval is nonempty."""
    interval = case1_interval(boundary, limits)
    if interval is None:
        return None
    lo, hi = interval
    if strategy == "midpoint":
        gP = 0.5 * (lo + hi)
    elif strategy == "lower-edge":
        gP = lo + 1e-6 * (hi - lo)
    elif strategy == "upper-edge":
        gP = hi - 1e-6 * (hi - lo)
    else:
        raise ArgumentError(f"unknown tie-break strategy {strategy!r}")
    try:
        vd, gd = maneuver_accels(boundary, gP, limits.VP_min)
    except DegenerateGeometryError:
        return None
    if not _constraints_ok(boundary, limits, gP, limits.VP_min, vd, gd):
        return None
    return _build(boundary, limits, 1, gP, limits.VP_min, vd, gd)


def solve_boundary_cases(boundary: ManeuverBoundary, limits: FeasibilityLimits) -> list[PerchSolution]:
    """Closed forms of Cases 2-5; only candidates passing their free checks are kept."""
    rng = limits.gammaP_range(boundary)
    if rng is None:
        return []
    gmin, gmax = rng
    V0 = boundary.V0
    out = []
    for case, gP in ((2, gmax), (3, gmin)):
        try:
            _, L_M, R_T = mean_geometry(boundary.gamma0, gP, boundary.xP, boundary.zP)
        except DegenerateGeometryError:
            continue
        if L_M <= 0 or R_T <= 0:
            continue
        VP = limits.gammadotT_max * R_T
        vd = (VP * VP - V0 * V0) / (2.0 * L_M)
        if abs(vd) < _GEOM_EPS:
            continue  # no descent phase: the deceleration is undefined
        if VP > limits.VP_min and vd > limits.VdotD_min:
            out.append(_build(boundary, limits, case, gP, VP, vd, limits.gammadotT_max))
    for case, gP in ((4, gmax), (5, gmin)):
        try:
            _, L_M, R_T = mean_geometry(boundary.gamma0, gP, boundary.xP, boundary.zP)
        except DegenerateGeometryError:
            continue
        if L_M <= 0 or R_T <= 0:
            continue
        rad = 2.0 * limits.VdotD_min * L_M + V0 * V0
        if rad <= 0:
            continue
        VP = math.sqrt(rad)
        if abs(VP * VP - V0 * V0) < _GEOM_EPS:
            continue  # no descent phase
        gd = VP / R_T
        if VP > limits.VP_min and gd < limits.gammadotT_max:
            out.append(_build(boundary, limits, case, gP, VP, limits.VdotD_min, gd))
    return out


def case6_quartic(boundary: ManeuverBoundary, VdotD: float, gammadotT: float) -> np.ndarray:
    """Coefficients (highest power first) of the quartic in ``a = tan gM - tan g0``.

    With ``vd = -2 VdotD/(xP gdot^2)``, ``v0 = V0/(xP gdot)`` and
    ``zb = zP/xP - tan g0``, the two kinematic equations reduce to
    ``b^2 = v0^2 - vd (a - zb)/(cos g0 a)`` and
    ``b = zb sec g0 (a^2 + 2 tan g0 a + sec^2 g0) / (2 a^2)``
    where ``b = VP/(xP gdot)``. Eliminating ``b`` and multiplying by
    ``4 a^4`` gives the polynomial returned here.
    """
    g0 = boundary.gamma0
    c0 = math.cos(g0)
    t0 = math.tan(g0)
    sec2 = 1.0 / (c0 * c0)
    xP = boundary.xP
    vd = -2.0 * VdotD / (xP * gammadotT**2)
    v0 = boundary.V0 / (xP * gammadotT)
    zb = boundary.zP / xP - t0
    k = zb * zb * sec2
    # 4 v0^2 a^4 - 4 vd a^3 (a - zb)/c0 - k (a^2 + 2 t0 a + sec2)^2 = 0
    a4 = 4.0 * v0 * v0 - 4.0 * vd / c0 - k
    a3 = 4.0 * vd * zb / c0 - 4.0 * k * t0
    a2 = -k * (4.0 * t0 * t0 + 2.0 * sec2)
    a1 = -4.0 * k * t0 * sec2
    a0 = -k * sec2 * sec2
    return np.array([a4, a3, a2, a1, a0])


def _real_roots(coeffs: np.ndarray, tol: float = 1e-7) -> list[float]:
    """Real roots via companion-matrix eigenvalues, each Newton-polished."""
    c = np.asarray(coeffs, dtype=float)
    while c.size > 1 and c[0] == 0.0:
        c = c[1:]
    if c.size < 2:
        return []
    roots = np.roots(c)
    dc = np.polyder(c)
    out = []
    for z in roots:
        scale = max(1.0, abs(z))
        if abs(z.imag) > tol * scale:
            continue
        x = float(z.real)
        for _ in range(3):
            d = np.polyval(dc, x)
            if d == 0:
                break
            step = np.polyval(c, x) / d
            x -= step
            if abs(step) < 1e-15 * max(1.0, abs(x)):
                break
        out.append(x)
    return out


def solve_case6(boundary: ManeuverBoundary, limits: FeasibilityLimits) -> Optional[PerchSolution]:
    """Both accelerations saturated; roots of the perch-angle quartic."""
    rng = limits.gammaP_range(boundary)
    if rng is None:
        return None
    gmin, gmax = rng
    g0 = boundary.gamma0
    t0 = math.tan(g0)
    zb = boundary.zP / boundary.xP - t0
    vd, gd = limits.VdotD_min, limits.gammadotT_max
    best = None
    for a in _real_roots(case6_quartic(boundary, vd, gd)):
        if not a > zb:  # positive characteristic length
            continue
        gM = math.atan(a + t0)
        gP = 2.0 * gM - g0
        if not gmin < gP < gmax:
            continue
        try:
            _, L_M, R_T = mean_geometry(g0, gP, boundary.xP, boundary.zP)
        except DegenerateGeometryError:
            continue
        if R_T <= 0:
            continue
        VP = gd * R_T
        if not VP > limits.VP_min:
            continue
        # the squared relation admits spurious roots; keep exact ones
        if abs(VP * VP - boundary.V0**2 - 2.0 * vd * L_M) > 1e-6 * (1.0 + boundary.V0**2):
            continue
        if best is None or VP < best[1]:
            best = (gP, VP)
    if best is None:
        return None
    return _build(boundary, limits, 6, best[0], best[1], vd, gd)


def solve_optimal(boundary: ManeuverBoundary, limits: FeasibilityLimits, strategy: str = "midpoint") -> Optional[PerchSolution]:
    """Minimal perch speed over all cases; ``None`` when no case qualifies."""
    sol = solve_case1(boundary, limits, strategy)
    if sol is not None:
        return sol
    candidates = solve_boundary_cases(boundary, limits)
    c6 = solve_case6(boundary, limits)
    if c6 is not None:
        candidates.append(c6)
    if not candidates:
        return None
    return min(candidates, key=lambda s: (s.VP, s.case))


# ---------------------------------------------------------------- KKT


def _constraint_values(boundary, limits, y, sigma):
    gP, VP, vd, gd = y
    g0, V0 = boundary.gamma0, boundary.V0
    rng = limits.gammaP_range(boundary) or limits.gammaP_mec_range
    dv = (VP * VP - V0 * V0) / (2.0 * vd)
    return np.array(
        [
            boundary.xP - VP / gd * (math.sin(gP) - math.sin(g0)) - math.cos(g0) * dv,
            boundary.zP + VP / gd * (math.cos(gP) - math.cos(g0)) - math.sin(g0) * dv,
            limits.VdotD_min - vd + sigma[0] ** 2,
            gd - limits.gammadotT_max + sigma[1] ** 2,
            rng[0] - gP + sigma[2] ** 2,
            gP - rng[1] + sigma[3] ** 2,
            limits.VP_min - VP + sigma[4] ** 2,
        ]
    )


def _stationarity_matrix(boundary, y):
    """Rows: the four (scaled) stationarity equations; columns: lambda_1..7.

    Returns ``(A, b)`` with the equations reading ``A @ lam + b = 0``.
    """
    gP, VP, vd, gd = y
    g0, V0 = boundary.gamma0, boundary.V0
    sP, cP, s0, c0 = math.sin(gP), math.cos(gP), math.sin(g0), math.cos(g0)
    tanM = -(cP - c0) / (sP - s0)
    A = np.zeros((4, 7))
    b = np.zeros(4)
    # d/d VdotD, divided by cos g0 (VP^2 - V0^2)/(2 VdotD^2)
    A[0, 0] = 1.0
    A[0, 1] = math.tan(g0)
    A[0, 2] = -2.0 * vd * vd / (c0 * (VP * VP - V0 * V0))
    # d/d gammadotT, divided by VP (sin gP - sin g0)/gdot^2
    A[1, 0] = 1.0
    A[1, 1] = tanM
    A[1, 3] = gd * gd / (VP * (sP - s0))
    # d/d gammaP
    A[2, 0] = -VP / gd * cP
    A[2, 1] = -VP / gd * sP
    A[2, 4] = -1.0
    A[2, 5] = 1.0
    # d/d VP, multiplied by VdotD * gdot
    A[3, 0] = -(vd * (sP - s0) + c0 * VP * gd)
    A[3, 1] = vd * (cP - c0) - s0 * VP * gd
    A[3, 6] = -vd * gd
    b[3] = vd * gd
    return A, b


def _slacks(boundary, limits, sol) -> tuple:
    y = sol.params()
    g = _constraint_values(boundary, limits, y, np.zeros(5))
    inactive_sigma = CASE_PATTERNS[sol.case][1]
    sig = []
    for j in range(5):
        if (j + 1) in inactive_sigma:
            sig.append(0.0)
        else:
            sig.append(math.sqrt(max(0.0, -g[j + 2])))
    return tuple(sig)


def _multipliers(boundary, limits, sol) -> tuple:
    zero_lam = CASE_PATTERNS[sol.case][0]
    free = [i for i in range(7) if (i + 1) not in zero_lam]
    A, b = _stationarity_matrix(boundary, sol.params())
    lam = np.zeros(7)
    sub, *_ = np.linalg.lstsq(A[:, free], -b, rcond=None)
    lam[free] = sub
    return tuple(float(v) for v in lam)


def kkt_residuals(boundary: ManeuverBoundary, limits: FeasibilityLimits, solution: PerchSolution) -> np.ndarray:
    """The 16 optimality equations evaluated at ``solution``.

    Order: 4 stationarity (w.r.t. VdotD, gammadotT, gammaP, VP), 5
    complementarity ``2 lambda_{j+2} sigma_j``, 7 constraints ``g_1..g_7``.
    """
    y = solution.params()
    lam = np.asarray(solution.multipliers, dtype=float)
    sig = np.asarray(solution.slacks, dtype=float)
    A, b = _stationarity_matrix(boundary, y)
    stat = A @ lam + b
    comp = 2.0 * lam[2:7] * sig
    cons = _constraint_values(boundary, limits, y, sig)
    return np.concatenate([stat, comp, cons])


# ---------------------------------------------------------------- oracle


def brute_force_optimum(boundary: ManeuverBoundary, limits: FeasibilityLimits, step: float = 1e-3):
    """Exhaustive perch-angle grid: minimal feasible ``VP`` and its grid point.

    For each perch angle the lowest speed meeting the speed floor and the
    deceleration bound is taken and checked against the turn-rate bound.
    Returns ``(VP, gammaP, active)`` or ``None``; ``active`` names the
    binding constraints at the minimizer.
    """
    rng = limits.gammaP_range(boundary)
    if rng is None:
        return None
    lo, hi = rng
    n = max(2, int(math.floor((hi - lo) / step)) + 1)
    best = None
    for gP in np.linspace(lo, hi, n):
        try:
            _, L_M, R_T = mean_geometry(boundary.gamma0, float(gP), boundary.xP, boundary.zP)
        except DegenerateGeometryError:
            continue
        if L_M <= 0 or R_T <= 0:
            continue
        rad = boundary.V0**2 + 2.0 * limits.VdotD_min * L_M
        v_dec = math.sqrt(rad) if rad > 0 else 0.0
        VP = max(limits.VP_min, v_dec)
        if VP > limits.gammadotT_max * R_T:
            continue
        if best is None or VP < best[0] - 1e-15:
            best = (VP, float(gP), L_M, R_T, v_dec)
    if best is None:
        return None
    VP, gP, L_M, R_T, v_dec = best
    active = set()
    if VP <= limits.VP_min + 1e-12:
        active.add("VP_min")
    if v_dec >= limits.VP_min:
        active.add("VdotD_min")
    if abs(gP - hi) < step:
        active.add("gammaP_max")
    if abs(gP - lo) < step:
        active.add("gammaP_min")
    if limits.gammadotT_max * R_T - VP < 0.05 * VP:
        active.add("gammadotT_max")
    return VP, gP, frozenset(active)


# ---------------------------------------------------------------- references


@dataclass(frozen=True)
class RefPoint:
    t: float
    x: float
    z: float
    V: float
    gamma: float
    Vdot: float
    gammadot: float


class ReferenceTrajectory:
    """Closed-form two-phase reference with lookup by time or horizontal position."""

    def __init__(self, boundary: ManeuverBoundary, solution: PerchSolution, dt: float = 0.01):
        self.boundary = boundary
        self.solution = solution
        g0, V0 = boundary.gamma0, boundary.V0
        gP, VP, vd, gd = solution.params()
        self.t_A = (VP - V0) / vd
        self.T_P = self.t_A + (gP - g0) / gd
        dv2 = (VP * VP - V0 * V0) / (2.0 * vd)
        self.x_A = math.cos(g0) * dv2
        self.z_A = math.sin(g0) * dv2
        self.dt = dt
        n = max(1, int(math.ceil(self.T_P / dt)))
        self.times = np.linspace(0.0, self.T_P, n + 1)

    def at_time(self, t: float) -> RefPoint:
        g0, V0 = self.boundary.gamma0, self.boundary.V0
        gP, VP, vd, gd = self.solution.params()
        t = min(max(t, 0.0), self.T_P)
        if t <= self.t_A:
            V = V0 + vd * t
            s = V0 * t + 0.5 * vd * t * t
            return RefPoint(t, s * math.cos(g0), s * math.sin(g0), V, g0, vd, 0.0)
        tau = t - self.t_A
        gam = g0 + gd * tau
        R = VP / gd
        x = self.x_A + R * (math.sin(gam) - math.sin(g0))
        z = self.z_A - R * (math.cos(gam) - math.cos(g0))
        return RefPoint(t, x, z, VP, gam, 0.0, gd)

    def at_x(self, x: float) -> RefPoint:
        """Reference point whose horizontal position equals ``x`` (clamped)."""
        g0, V0 = self.boundary.gamma0, self.boundary.V0
        gP, VP, vd, gd = self.solution.params()
        if x <= 0.0:
            return self.at_time(0.0)
        if x <= self.x_A:
            s = x / math.cos(g0)
            disc = V0 * V0 + 2.0 * vd * s
            V = math.sqrt(max(disc, 0.0))
            t = (V - V0) / vd
            return RefPoint(t, x, s * math.sin(g0), V, g0, vd, 0.0)
        R = VP / gd
        sg = math.sin(g0) + (x - self.x_A) / R
        if sg >= math.sin(gP):
            return self.at_time(self.T_P)
        gam = math.asin(sg)
        t = self.t_A + (gam - g0) / gd
        z = self.z_A - R * (math.cos(gam) - math.cos(g0))
        return RefPoint(t, x, z, VP, gam, 0.0, gd)

    def samples(self) -> list[RefPoint]:
        return [self.at_time(float(t)) for t in self.times]

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x", "z", "V", "gamma", "Vdot", "gammadot"])
            for p in self.samples():
                w.writerow([repr(v) for v in (p.t, p.x, p.z, p.V, p.gamma, p.Vdot, p.gammadot)])


def reference_trajectory(boundary: ManeuverBoundary, solution: PerchSolution, dt: float = 0.01) -> ReferenceTrajectory:
    return ReferenceTrajectory(boundary, solution, dt)


# ---------------------------------------------------------------- region map

REGION_COLUMNS = ("x0", "z0", "case", "VP", "gammaP", "VdotD", "gammadotT")


def region_map(
    x0s: Iterable[float],
    z0s: Iterable[float],
    gamma0: float,
    V0: float,
    limits: FeasibilityLimits,
    path: str | Path | None = None,
    strategy: str = "midpoint",
) -> list[tuple]:
    """Classify start points ``(x0, z0)`` relative to a perch at the origin.

    Each row is ``(x0, z0, case, VP, gammaP, VdotD, gammadotT)`` with
    ``case = 0`` and NaN quantities for infeasible points.
    """
    rows = []
    nan = float("nan")
    for z0 in z0s:
        for x0 in x0s:
            sol = None
            if x0 < 0:
                sol = solve_optimal(ManeuverBoundary(gamma0, V0, -float(x0), -float(z0)), limits, strategy)
            if sol is None:
                rows.append((float(x0), float(z0), 0, nan, nan, nan, nan))
            else:
                rows.append((float(x0), float(z0), sol.case, sol.VP, sol.gammaP, sol.VdotD, sol.gammadotT))
    if path is not None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(REGION_COLUMNS)
            w.writerows(rows)
    return rows
