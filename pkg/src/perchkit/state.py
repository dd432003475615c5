"""Flight state, control inputs and model mode."""

from __future__ import annotations

import enum
import math
from dataclasses import astuple, dataclass

from .errors import ArgumentError
from .params import PlatformParams


class ModelMode(enum.Enum):
    """``FULL`` keeps the flapping lift oscillation, ``AVERAGED`` drops it."""

    FULL = "full"
    AVERAGED = "averaged"

    @classmethod
    def parse(cls, value) -> "ModelMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ArgumentError(f"unknown model mode {value!r}") from None


@dataclass(frozen=True)
class FlightState:
    x: float
    z: float
    theta: float
    V: float
    gamma: float
    q: float

    @property
    def alpha(self) -> float:
        """Wing angle of attack, theta - gamma."""
        return self.theta - self.gamma

    def alpha_t(self, params: PlatformParams) -> float:
        return self.alpha + params.x_t * self.q / self.V

    def reduced_frequency(self, f: float, params: PlatformParams) -> float:
        return math.pi * f * params.c / self.V

    def body_velocity(self) -> tuple[float, float]:
        """Body-axis components (u, w) of the airspeed."""
        return self.V * math.cos(self.alpha), self.V * math.sin(self.alpha)

    def as_tuple(self) -> tuple:
        return astuple(self)

    @classmethod
    def from_seq(cls, seq) -> "FlightState":
        x, z, theta, V, gamma, q = (float(v) for v in seq)
        return cls(x, z, theta, V, gamma, q)


@dataclass(frozen=True)
class ControlInputs:
    f: float  # flapping frequency [Hz]
    delta_e: float  # tail deflection [rad], positive tail down

    def __post_init__(self):
        if not self.f >= 0:
            raise ArgumentError(f"flapping frequency must be >= 0, got {self.f!r}")
