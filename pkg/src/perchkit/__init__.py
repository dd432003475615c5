"""perchkit: perching maneuver planning, adaptive flight control and closed-loop
simulation for a bird-size flapping-wing vehicle."""

__version__ = "0.1.0"

from .errors import (
    ArgumentError,
    DegenerateGeometryError,
    EnvelopeError,
    ModelRangeError,
    PerchkitError,
    ProjectorBreachError,
    SingularityError,
    TrimNotFoundError,
)
from .kernels import BACKEND
from .params import AeroCoeffs, PlatformParams, preset
from .state import ControlInputs, FlightState, ModelMode
from .aero import model_fidelity_report, total_forces
from .dynamics import SimLog, simulate_open_loop, state_derivative, step
from .planner import (
    FeasibilityConfig,
    FeasibilityLimits,
    ManeuverBoundary,
    PerchSolution,
    ReferenceTrajectory,
    feasibility_limits,
    kkt_residuals,
    region_map,
    solve_optimal,
)
from .control import Gains
from .sim import SCENARIOS, PerchMetrics, Scenario, run_closed_loop, scenario

__all__ = [
    "__version__", "BACKEND",
    "PerchkitError", "ArgumentError", "EnvelopeError", "ModelRangeError", "SingularityError",
    "DegenerateGeometryError", "TrimNotFoundError", "ProjectorBreachError",
    "PlatformParams", "AeroCoeffs", "preset",
    "FlightState", "ControlInputs", "ModelMode",
    "total_forces", "model_fidelity_report",
    "SimLog", "state_derivative", "step", "simulate_open_loop",
    "ManeuverBoundary", "FeasibilityConfig", "FeasibilityLimits", "PerchSolution", "ReferenceTrajectory",
    "feasibility_limits", "solve_optimal", "kkt_residuals", "region_map",
    "Gains", "Scenario", "PerchMetrics", "SCENARIOS", "scenario", "run_closed_loop",
]
