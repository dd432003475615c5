"""Platform and aerodynamic parameter records.

Default values are the e-flap ornithopter identification (preset ``"eflap"``).
Two values the identification does not publish, the tail chord ``c_t`` and the
wingspan ``b``, carry documented placeholder defaults; ``b`` enters no
longitudinal equation.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import ArgumentError

__all__ = [
    "PlatformParams",
    "AeroCoeffs",
    "PRESETS",
    "preset",
    "pack",
    "PACK_SIZE",
]


@dataclass(frozen=True)
class PlatformParams:
    x_a: float = 0.05  # aerodynamic center -> CG [m]
    x_t: float = 0.3  # CG -> tail hinge [m]
    c: float = 0.36  # wing chord [m]
    c_t: float = 0.35  # tail chord [m]
    S: float = 0.42  # wing area [m^2]
    S_t: float = 0.12  # tail area [m^2]
    b: float = 1.17  # wingspan [m], stored only
    I_y: float = 0.044  # pitch inertia [kg m^2]
    m: float = 0.64  # mass [kg]
    g: float = 9.81  # [m/s^2]
    rho: float = 1.22  # air density [kg/m^3]

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (math.isfinite(v) and v > 0):
                raise ArgumentError(f"{f.name} must be strictly positive, got {v!r}")
        if not self.S_t < self.S:
            raise ArgumentError("tail area must be smaller than wing area")
        if not self.x_t > self.x_a:
            raise ArgumentError("tail arm x_t must exceed x_a")

    @property
    def beta1(self) -> float:
        """rho*S/(2m), the lift-to-acceleration factor (also q-bar of the velocity loop)."""
        return self.rho * self.S / (2.0 * self.m)

    @property
    def beta2w(self) -> float:
        return self.rho * self.S / (2.0 * self.I_y)

    @property
    def beta2t(self) -> float:
        return self.rho * self.S_t / (2.0 * self.I_y)

    def dynamic_pressure(self, V: float) -> float:
        return 0.5 * self.rho * V * V * self.S

    def tail_dynamic_pressure(self, V: float) -> float:
        return 0.5 * self.rho * V * V * self.S_t

    def to_dict(self) -> dict:
        return asdict(self)


_DIMS = {
    "theta_Lw": 7,
    "theta_Lw_check": 7,
    "theta_Dw": 7,
    "theta_Mw": 6,
    "theta_Lt": 2,
    "theta_Dt": 3,
    "theta_Mt": 2,
    "theta_S": 2,
    "theta_Lw_red": 5,
    "theta_Dw_red": 3,
}


def _vec(values):
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class AeroCoeffs:
    """Identified aerodynamic coefficient vectors.

    Full wing vectors pair with the regressor ``(1, a, k, a^2, k^2, a*k, k^3)``;
    the 6-entry moment vector uses the first six entries. The reduced
    vectors pair with ``(1, a, a^2, k^2, a*k)`` (lift) and ``(1, a^2, k^4)``
    (drag). ``body_lift``/``body_drag`` are constant coefficients scaled by the
    wing dynamic pressure; both default to zero.
    """

    theta_Lw: tuple = (-0.31, 2.19, 0.37, 7.38, -0.37, 2.33, 0.0)
    theta_Lw_check: tuple = (2.85, 2.65, -4.32, -11.24, 7.47, -1.22, 0.0)
    theta_Dw: tuple = (4.41, -1.10, -16.47, 7.21, 24.82, 0.76, -12.44)
    theta_Mw: tuple = (-0.0614, -0.12, 0.0697, -0.41, -0.0797, -0.74)
    theta_Lt: tuple = (0.94, 2.92)
    theta_Dt: tuple = (0.36, 0.32, 4.23)
    theta_Mt: tuple = (-0.65, 2.26)
    theta_S: tuple = (1.35, -0.3)
    theta_Lw_red: tuple = (-0.0988, 2.14, 7.39, -0.24, 2.37)
    theta_Dw_red: tuple = (2.17, 7.09, -1.92)
    body_lift: float = 0.0
    body_drag: float = 0.0

    def __post_init__(self):
        for name, n in _DIMS.items():
            vec = _vec(getattr(self, name))
            if len(vec) != n:
                raise ArgumentError(f"{name} needs {n} entries, got {len(vec)}")
            if not all(math.isfinite(v) for v in vec):
                raise ArgumentError(f"{name} has non-finite entries")
            object.__setattr__(self, name, vec)
        # zero is tolerated so that an all-zero record can switch aerodynamics off
        if self.theta_Dw_red[2] > 0:
            raise ArgumentError("thrust coefficient theta_Dw_red[2] must be negative")
        if self.theta_Lt[1] < 0:
            raise ArgumentError("tail lift slope theta_Lt[1] must be positive")

    @classmethod
    def zeros(cls) -> "AeroCoeffs":
        """All coefficients zero (stall shape kept): aerodynamics switched off."""
        return cls(**{n: (0.0,) * d for n, d in _DIMS.items() if n != "theta_S"})

    @property
    def drag_alpha(self) -> tuple:
        """Drag part of the reduced drag vector, paired with (1, a^2)."""
        return self.theta_Dw_red[:2]

    @property
    def drag_k(self) -> float:
        """Thrust coefficient of the reduced drag vector, paired with k^4."""
        return self.theta_Dw_red[2]

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


PRESETS = {"eflap": (PlatformParams(), AeroCoeffs())}


def preset(name: str = "eflap"):
    """Return ``(PlatformParams, AeroCoeffs)`` for a named preset."""
    try:
        return PRESETS[name]
    except KeyError:
        raise ArgumentError(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None


# Flat float64 layout shared with the kernels (see kernels.LAYOUT).
_PLATFORM_ORDER = ("x_a", "x_t", "c", "c_t", "S", "S_t", "b", "I_y", "m", "g", "rho")
_COEFF_ORDER = (
    "theta_Lw",
    "theta_Lw_check",
    "theta_Dw",
    "theta_Mw",
    "theta_Lt",
    "theta_Dt",
    "theta_Mt",
    "theta_S",
    "theta_Lw_red",
    "theta_Dw_red",
)
PACK_SIZE = len(_PLATFORM_ORDER) + sum(_DIMS.values()) + 2


def pack(params: PlatformParams, coeffs: AeroCoeffs) -> np.ndarray:
    """Flatten parameters into the contiguous array the kernels consume."""
    out = [getattr(params, n) for n in _PLATFORM_ORDER]
    for n in _COEFF_ORDER:
        out.extend(getattr(coeffs, n))
    out.extend((coeffs.body_lift, coeffs.body_drag))
    arr = np.asarray(out, dtype=np.float64)
    assert arr.size == PACK_SIZE
    return arr


def layout() -> dict:
    """Offsets of each named block inside the packed array."""
    off = {}
    i = 0
    for n in _PLATFORM_ORDER:
        off[n] = i
        i += 1
    for n in _COEFF_ORDER:
        off[n] = i
        i += _DIMS[n]
    off["body_lift"] = i
    off["body_drag"] = i + 1
    return off
