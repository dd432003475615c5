"""Longitudinal equations of motion and explicit-Euler integration."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence, Union

import numpy as np
from scipy import optimize

from . import kernels
from .aero import packed
from .errors import ArgumentError, PerchkitError
from .params import AeroCoeffs, PlatformParams
from .state import ControlInputs, FlightState, ModelMode

__all__ = [
    "DEFAULT_DT",
    "V_FLOOR",
    "StateDerivative",
    "SimLog",
    "state_derivative",
    "step",
    "simulate_open_loop",
    "plant_trim",
]

DEFAULT_DT = 5e-4
V_FLOOR = 0.1

BASE_COLUMNS = ("t", "x", "z", "theta", "V", "gamma", "q", "alpha", "k", "f", "delta_e")


@dataclass(frozen=True)
class StateDerivative:
    dx: float
    dz: float
    dtheta: float
    dV: float
    dgamma: float
    dq: float

    def as_array(self) -> np.ndarray:
        return np.array([self.dx, self.dz, self.dtheta, self.dV, self.dgamma, self.dq])


def _aero_model(design: bool) -> int:
    return kernels.DESIGN_AERO if design else kernels.FULL_AERO


def state_derivative(
    state: FlightState,
    inputs: ControlInputs,
    t: float,
    mode: ModelMode = ModelMode.FULL,
    params: PlatformParams | None = None,
    coeffs: AeroCoeffs | None = None,
    v_floor: float = V_FLOOR,
) -> StateDerivative:
    params = params or PlatformParams()
    coeffs = coeffs or AeroCoeffs()
    mode = ModelMode.parse(mode)
    out = np.empty(6)
    kernels.derivative(
        packed(params, coeffs),
        np.asarray(state.as_tuple(), dtype=np.float64),
        inputs.f,
        inputs.delta_e,
        math.sin(2 * math.pi * inputs.f * t),
        int(mode is ModelMode.AVERAGED),
        kernels.FULL_AERO,
        v_floor,
        out,
    )
    return StateDerivative(*(float(v) for v in out))


def step(
    state: FlightState,
    inputs: ControlInputs,
    t: float,
    dt: float,
    mode: ModelMode = ModelMode.FULL,
    params: PlatformParams | None = None,
    coeffs: AeroCoeffs | None = None,
    v_floor: float = V_FLOOR,
) -> FlightState:
    """One explicit-Euler step; ``dt == 0`` returns the state unchanged."""
    if dt < 0:
        raise ArgumentError(f"dt must be non-negative, got {dt!r}")
    if dt == 0:
        return state
    d = state_derivative(state, inputs, t, mode, params, coeffs, v_floor).as_array()
    return FlightState.from_seq(np.asarray(state.as_tuple()) + dt * d)


class SimLog:
    """Column store for a time-indexed simulation record."""

    def __init__(self, columns: dict[str, np.ndarray], meta: dict | None = None):
        n = {len(v) for v in columns.values()}
        if len(n) > 1:
            raise ArgumentError("log columns differ in length")
        self.columns = {k: np.asarray(v, dtype=float) for k, v in columns.items()}
        self.meta = dict(meta or {})

    def __len__(self):
        return len(self.columns["t"])

    def __getitem__(self, name) -> np.ndarray:
        return self.columns[name]

    def __contains__(self, name):
        return name in self.columns

    @property
    def names(self) -> list[str]:
        base = [c for c in BASE_COLUMNS if c in self.columns]
        return base + [c for c in self.columns if c not in BASE_COLUMNS]

    def state(self, i: int) -> FlightState:
        return FlightState(*(float(self.columns[c][i]) for c in ("x", "z", "theta", "V", "gamma", "q")))

    def to_csv(self, path: str | Path) -> None:
        names = self.names
        data = np.column_stack([self.columns[c] for c in names]) if len(self) else np.empty((0, len(names)))
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(names)
            for row in data:
                w.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path: str | Path) -> "SimLog":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        header, body = rows[0], rows[1:]
        arr = np.array(body, dtype=float).reshape(len(body), len(header))
        return cls({h: arr[:, i] for i, h in enumerate(header)})


Schedule = Union[ControlInputs, Callable[[float], ControlInputs], Sequence[tuple]]


def _schedule_arrays(schedule: Schedule, times: np.ndarray, duration: float):
    if isinstance(schedule, ControlInputs):
        return np.full(times.size, schedule.f), np.full(times.size, schedule.delta_e)
    if callable(schedule):
        vals = [schedule(float(t)) for t in times]
        return np.array([u.f for u in vals], dtype=float), np.array([u.delta_e for u in vals], dtype=float)
    segments = sorted(((float(a), float(b), u) for a, b, u in schedule), key=lambda s: s[0])
    if not segments:
        raise ArgumentError("empty input schedule")
    tol = 1e-9
    cursor = 0.0
    for a, b, _ in segments:
        if a > cursor + tol:
            raise ArgumentError(f"input schedule has a gap on [{cursor:.6g}, {a:.6g}]")
        cursor = max(cursor, b)
    if cursor < duration - tol:
        raise ArgumentError(f"input schedule ends at {cursor:.6g} before duration {duration:.6g}")
    f = np.empty(times.size)
    de = np.empty(times.size)
    starts = np.array([s[0] for s in segments])
    for i, t in enumerate(times):
        j = int(np.searchsorted(starts, t + tol, side="right")) - 1
        u = segments[max(j, 0)][2]
        f[i] = u.f
        de[i] = u.delta_e
    return f, de


def simulate_open_loop(
    initial: FlightState,
    input_schedule: Schedule,
    duration: float,
    dt: float = DEFAULT_DT,
    mode: ModelMode = ModelMode.FULL,
    params: PlatformParams | None = None,
    coeffs: AeroCoeffs | None = None,
    v_floor: float = V_FLOOR,
    design_plant: bool = False,
) -> SimLog:
    """Integrate a fixed input schedule with explicit Euler.

    ``input_schedule`` is a constant :class:`ControlInputs`, a callable of
    time, or a list of ``(t_start, t_end, ControlInputs)`` segments that must
    cover ``[0, duration]`` without gaps.
    """
    params = params or PlatformParams()
    coeffs = coeffs or AeroCoeffs()
    mode = ModelMode.parse(mode)
    if duration < 0 or not dt > 0:
        raise ArgumentError("duration must be >= 0 and dt > 0")
    n = int(round(duration / dt))
    times = np.arange(n + 1) * dt
    f, de = _schedule_arrays(input_schedule, times, duration)
    out = np.empty((n + 1, 6))
    kernels.euler(
        packed(params, coeffs),
        np.asarray(initial.as_tuple(), dtype=np.float64),
        np.ascontiguousarray(f[:n]),
        np.ascontiguousarray(de[:n]),
        dt,
        0.0,
        1.0,
        int(mode is ModelMode.AVERAGED),
        _aero_model(design_plant),
        v_floor,
        out,
    )
    cols = {"t": times}
    for j, name in enumerate(("x", "z", "theta", "V", "gamma", "q")):
        cols[name] = out[:, j]
    cols["alpha"] = out[:, 2] - out[:, 4]
    cols["k"] = math.pi * f * params.c / out[:, 3]
    cols["f"] = f
    cols["delta_e"] = de
    return SimLog(cols, meta={"mode": mode.value, "dt": dt})


@dataclass(frozen=True)
class PlantTrim:
    alpha: float
    f: float
    delta_e: float

    def state(self, V: float, gamma: float = 0.0) -> FlightState:
        return FlightState(0.0, 0.0, gamma + self.alpha, V, gamma, 0.0)

    def inputs(self) -> ControlInputs:
        return ControlInputs(self.f, self.delta_e)


def plant_trim(
    V: float,
    gamma: float = 0.0,
    params: PlatformParams | None = None,
    coeffs: AeroCoeffs | None = None,
    guess=(0.18, 5.0, -0.2),
) -> PlantTrim:
    """Averaged full-model trim (dV = dgamma = dq = 0 with q = 0)."""
    params = params or PlatformParams()
    coeffs = coeffs or AeroCoeffs()

    def resid(z):
        a, f, de = z
        try:
            d = state_derivative(
                FlightState(0.0, 0.0, gamma + a, V, gamma, 0.0),
                ControlInputs(max(f, 0.0), de),
                0.0,
                ModelMode.AVERAGED,
                params,
                coeffs,
            )
        except PerchkitError:
            return [1e3, 1e3, 1e3]
        return [d.dV, d.dgamma * V, d.dq * params.I_y]

    sol = optimize.root(resid, guess, method="hybr", options={"xtol": 1e-13})
    if not sol.success or max(abs(r) for r in resid(sol.x)) > 1e-8:
        raise PerchkitError(f"plant trim failed at V={V}, gamma={gamma}: {sol.message}")
    a, f, de = (float(v) for v in sol.x)
    return PlantTrim(a, f, de)
