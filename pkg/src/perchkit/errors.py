"""Exception types raised across perchkit."""


class PerchkitError(Exception):
    """Base class for all perchkit errors."""


class ArgumentError(PerchkitError, ValueError):
    """Invalid argument (empty grid, bad schedule, non-positive constant, ...)."""


class EnvelopeError(PerchkitError):
    """Angle of attack outside the stall-model envelope."""

    def __init__(self, alpha, message=None):
        self.alpha = alpha
        super().__init__(message or f"angle of attack {alpha:.6g} rad outside stall envelope")


class ModelRangeError(PerchkitError):
    """Reduced frequency outside the identified range (k >= 2)."""

    def __init__(self, k):
        self.k = k
        super().__init__(f"reduced frequency k={k:.6g} outside model range k<2")


class SingularityError(PerchkitError):
    """Airspeed fell below the floor where the path-angle equation is singular."""

    def __init__(self, V, v_floor):
        self.V = V
        self.v_floor = v_floor
        super().__init__(f"airspeed {V:.6g} m/s below floor {v_floor:.6g} m/s")


class DegenerateGeometryError(PerchkitError):
    """Maneuver geometry has no well-defined mean attitude / radius."""


class TrimNotFoundError(PerchkitError):
    """The path-angle trim function does not change sign on the bracket."""


class ProjectorBreachError(PerchkitError):
    """Estimated tail command left the arcsin domain despite the projector."""

    def __init__(self, value):
        self.value = value
        super().__init__(f"|phi_hat . psi| = {abs(value):.6g} > 1")
