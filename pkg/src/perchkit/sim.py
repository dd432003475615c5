"""Closed-loop perching runs, metrics and verification sweeps."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import control, kernels
from .aero import packed
from .dynamics import DEFAULT_DT, V_FLOOR, SimLog
from .errors import ArgumentError, PerchkitError
from .params import AeroCoeffs, PlatformParams
from .planner import (
    FeasibilityLimits,
    ManeuverBoundary,
    PerchSolution,
    ReferenceTrajectory,
    feasibility_limits,
    solve_optimal,
)
from .state import FlightState, ModelMode

__all__ = [
    "Scenario",
    "PerchMetrics",
    "SCENARIOS",
    "scenario",
    "run_closed_loop",
    "regulation_run",
    "averaging_gap",
    "GapPoint",
    "robustness_sweep",
    "RobustnessCell",
    "control_decomposition",
    "DECOMPOSITION_COLUMNS",
]


@dataclass(frozen=True)
class Scenario:
    name: str
    boundary: ManeuverBoundary
    params: PlatformParams = field(default_factory=PlatformParams)
    coeffs: AeroCoeffs = field(default_factory=AeroCoeffs)
    gains: control.Gains = field(default_factory=control.Gains)
    mode: ModelMode = ModelMode.FULL
    dt: float = DEFAULT_DT
    theta_init_scale: float = 1.0  # velocity-loop estimate at t=0, relative to nominal
    phi_init_scale: float = 1.0  # attitude-loop estimate at t=0, relative to nominal
    mass_scale: float = 1.0  # plant mass relative to the controller's value
    cg_offset: float = 0.0  # plant shift of x_a [m]
    freq_scale: float = 1.0  # flapping-phase rate multiplier (averaging study)
    design_plant: bool = False  # fly the control-design model instead of the full model
    strategy: str = "midpoint"
    horizon_factor: float = 2.0
    q_ref_tau: float = 0.05  # time constant of the pitch-rate reference filter [s]
    preview: float = 0.05  # reference look-ahead time [s]
    limits: FeasibilityLimits | None = None
    monitor_lyapunov: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode", ModelMode.parse(self.mode))
        if not self.dt > 0:
            raise ArgumentError("dt must be positive")
        if not (self.mass_scale > 0 and self.freq_scale > 0 and self.horizon_factor > 0):
            raise ArgumentError("mass_scale, freq_scale and horizon_factor must be positive")
        if self.theta_init_scale < 0 or self.phi_init_scale < 0:
            raise ArgumentError("initial-estimate scales must be non-negative")

    def plant_params(self) -> PlatformParams:
        if self.mass_scale == 1.0 and self.cg_offset == 0.0:
            return self.params
        return replace(self.params, m=self.params.m * self.mass_scale, x_a=self.params.x_a + self.cg_offset)

    def feasibility(self) -> FeasibilityLimits:
        return self.limits or feasibility_limits(self.params)

    def solution(self) -> PerchSolution:
        sol = solve_optimal(self.boundary, self.feasibility(), self.strategy)
        if sol is None:
            raise ArgumentError(f"scenario {self.name!r}: no feasible perching trajectory")
        return sol


def _drogon(name, gamma0, xP):
    return Scenario(name, ManeuverBoundary(gamma0, 6.0, xP, 0.0))


SCENARIOS = {
    "drogon-12": _drogon("drogon-12", -0.2, 12.0),
    "drogon-9": _drogon("drogon-9", -0.2, 9.0),
    "drogon-7": _drogon("drogon-7", -0.14, 7.0),
    "drogon-5": _drogon("drogon-5", -0.14, 5.0),
}


def scenario(name: str, **overrides) -> Scenario:
    try:
        base = SCENARIOS[name]
    except KeyError:
        raise ArgumentError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}") from None
    return replace(base, **overrides) if overrides else base


@dataclass(frozen=True)
class PerchMetrics:
    status: str  # "perched", "timeout" or "aborted: <reason>"
    position_error: float
    vertical_error: float
    speed: float
    speed_error: float  # relative to the planned perch speed
    gamma: float
    t_perch: float
    V_rmse: float
    gamma_rmse: float
    max_phi_psi: float
    estimates_bounded: bool
    VP_planned: float
    error: Exception | None = field(default=None, compare=False, repr=False)

    @property
    def perched(self) -> bool:
        return self.status == "perched"

    @property
    def phi_psi_margin(self) -> float:
        return 1.0 - self.max_phi_psi

    def as_row(self) -> dict:
        return {
            "status": self.status,
            "position_error": self.position_error,
            "vertical_error": self.vertical_error,
            "speed": self.speed,
            "speed_error": self.speed_error,
            "gamma": self.gamma,
            "t_perch": self.t_perch,
            "V_rmse": self.V_rmse,
            "gamma_rmse": self.gamma_rmse,
            "max_phi_psi": self.max_phi_psi,
            "estimates_bounded": self.estimates_bounded,
        }


LOG_EXTRA = (
    "V_R", "gamma_R", "gamma_G", "gammadot_R", "z_R", "Vdot_R",
    "e", "e1", "e2", "e2_tilde", "e3_tilde", "alpha_R",
    "C_T", "CT_prop", "CT_adapt", "CT_grav", "CT_ff",
    "de_arcsin", "de_rate", "de_alpha", "phi_psi",
    "f_sat", "de_sat", "guid_clamp", "trim_ok",
    "theta_hat_0", "theta_hat_1",
    "phi_hat_0", "phi_hat_1", "phi_hat_2", "phi_hat_3", "phi_hat_4", "phi_hat_5",
)
LYAP_EXTRA = ("W", "W3")

_BOUND = 1e6  # "bounded" threshold for estimates in a finite run


def _trim_state(V: float, gamma: float, sc: Scenario, th: control.VelocityAdaptiveState) -> tuple[FlightState, float]:
    p_ctrl, coeffs = sc.params, sc.coeffs
    p = packed(p_ctrl, coeffs)
    alpha, f = 0.18, 5.0
    refs = control.ControlReferences(V, 0.0, gamma, 0.0)
    for _ in range(20):
        k = min(math.pi * f * p_ctrl.c / V, control.K_MAX)
        alpha, _ = control._trim_or_edge(p, V, gamma, 0.0, k)
        f = control.velocity_feedback(V, gamma, alpha, refs, th, sc.gains, p_ctrl, coeffs).f
    return FlightState(0.0, 0.0, gamma + alpha, V, gamma, 0.0), f


def run_closed_loop(scenario: Scenario, solution: PerchSolution | None = None) -> tuple[SimLog, PerchMetrics]:
    """Fly ``scenario`` with guidance and both adaptive loops until x reaches x_P.

    Integration is explicit Euler at ``scenario.dt`` for plant and estimates.
    Envelope, singularity and projector failures end the run early; the
    partial log is returned and the metrics carry ``status='aborted: ...'``.
    """
    sc = scenario
    sol = solution or sc.solution()
    ref = ReferenceTrajectory(sc.boundary, sol)
    gains, coeffs = sc.gains, sc.coeffs
    p_ctrl = sc.params
    p_plant_rec = sc.plant_params()
    p_plant = packed(p_plant_rec, coeffs)
    averaged = int(sc.mode is ModelMode.AVERAGED)
    aero_model = kernels.DESIGN_AERO if sc.design_plant else kernels.FULL_AERO
    dt = sc.dt
    xP, zP = sc.boundary.xP, sc.boundary.zP
    t_end = sc.horizon_factor * ref.T_P

    vel = control.VelocityAdaptiveState.nominal(coeffs, sc.theta_init_scale)
    att = control.AttitudeAdaptiveState.nominal(p_ctrl, coeffs, sc.phi_init_scale)
    Gamma_proj = gains.gamma_proj * np.eye(6)
    state, _ = _trim_state(sc.boundary.V0, sc.boundary.gamma0, sc, vel)

    names = ("t", "x", "z", "theta", "V", "gamma", "q", "alpha", "k", "f", "delta_e") + LOG_EXTRA
    if sc.monitor_lyapunov:
        names = names + LYAP_EXTRA
    rows: list[tuple] = []
    y = np.array(state.as_tuple(), dtype=float)
    dy = np.empty(6)
    phase = 0.0
    t = 0.0
    q_ref = 0.0
    status = "timeout"
    err: Exception | None = None
    n_max = int(math.ceil(t_end / dt))
    for _ in range(n_max + 1):
        state = FlightState(*y)
        try:
            if not state.V > V_FLOOR:
                from .errors import SingularityError

                raise SingularityError(state.V, V_FLOOR)
            rp = ref.at_x(state.x + sc.preview * state.V * math.cos(state.gamma))
            z_R = ref.at_x(state.x).z if sc.preview else rp.z
            g_cmd = control.guidance(state.z, z_R, state.V, rp.V, rp.gamma, gains.kG)
            refs = control.ControlReferences(rp.V, rp.Vdot, g_cmd.gamma_G, rp.gammadot, state.x, z_R, q_ref)
            vcmd = control.velocity_feedback(state.V, state.gamma, state.alpha, refs, vel, gains, p_ctrl, coeffs)
            f = vcmd.f
            k = math.pi * f * p_ctrl.c / state.V
            acmd = control.attitude_feedback(state, k, refs, att, gains, p_ctrl, coeffs)
            de = acmd.delta_e
            row = [t, *y, state.alpha, k, f, de,
                   rp.V, rp.gamma, g_cmd.gamma_G, rp.gammadot, z_R, rp.Vdot,
                   vcmd.e, acmd.e1, acmd.e2, acmd.e2_tilde, acmd.e3_tilde, acmd.alpha_R,
                   vcmd.C_T, *vcmd.terms,
                   *acmd.terms, acmd.phi_psi,
                   float(vcmd.saturated), float(acmd.saturated), float(g_cmd.clamped), float(acmd.trim_ok),
                   *vel.theta_hat, *att.phi_hat]
            if sc.monitor_lyapunov:
                row.append(control.lyapunov_W(vcmd.e, vel.theta_hat, gains, coeffs))
                row.append(control.lyapunov_W3(acmd, state, refs, k, att.phi_hat, gains, p_ctrl, coeffs))
            rows.append(tuple(row))
            if state.x >= xP:
                status = "perched"
                break
            if t >= t_end:
                break
            kernels.derivative(p_plant, y, f, de, math.sin(phase), averaged, aero_model, V_FLOOR, dy)
            gdot_G = control.guidance_rate(g_cmd, state.V, state.gamma, rp.V, rp.Vdot, rp.gamma, rp.gammadot, gains.kG)
            th_dot = control.velocity_adapt(vcmd.e, state.alpha, refs, vel, gains, p_ctrl)
            ph_dot = control.attitude_adapt(state.V, acmd.e3_tilde, acmd.psi, gains, p_ctrl, coeffs)
            ph_dot = control.project(att.phi_hat, ph_dot, acmd.psi, gains.eps, Gamma_proj, p_ctrl)
        except PerchkitError as exc:
            status = f"aborted: {type(exc).__name__}"
            err = exc
            break
        y = y + dt * dy
        vel.theta_hat = vel.theta_hat + dt * th_dot
        att.phi_hat = att.phi_hat + dt * ph_dot
        q_ref += (gdot_G - q_ref) * (dt / sc.q_ref_tau if sc.q_ref_tau > dt else 1.0)
        phase += 2.0 * math.pi * sc.freq_scale * f * dt
        t += dt

    data = np.array(rows, dtype=float).reshape(len(rows), len(names))
    log = SimLog({n: data[:, i] for i, n in enumerate(names)},
                 meta={"scenario": sc.name, "mode": sc.mode.value, "dt": dt, "status": status})
    return log, _metrics(log, sol, sc, status, err)


def regulation_run(
    sc: Scenario,
    V_R: float,
    gamma_R: float,
    duration: float,
    dV: float = 0.3,
    dgamma: float = 0.05,
    integrator: str = "euler",
) -> SimLog:
    """Hold constant references ``(V_R, gamma_R)`` from an offset trim state.

    Guidance is bypassed and the pitch-rate reference is zero, which is the
    setting of the stability argument; the log carries ``W`` and ``W3``.
    ``integrator="rk4"`` advances plant, estimates and flapping phase with
    classical Runge-Kutta so that per-step Lyapunov increments reflect the
    continuous-time closed loop rather than Euler truncation.
    """
    if integrator not in ("euler", "rk4"):
        raise ArgumentError(f"integrator must be 'euler' or 'rk4', got {integrator!r}")
    gains, coeffs, p_ctrl = sc.gains, sc.coeffs, sc.params
    p_plant = packed(sc.plant_params(), coeffs)
    averaged = int(sc.mode is ModelMode.AVERAGED)
    aero_model = kernels.DESIGN_AERO if sc.design_plant else kernels.FULL_AERO
    vel = control.VelocityAdaptiveState.nominal(coeffs, sc.theta_init_scale)
    att = control.AttitudeAdaptiveState.nominal(p_ctrl, coeffs, sc.phi_init_scale)
    Gamma_proj = gains.gamma_proj * np.eye(6)
    refs = control.ControlReferences(V_R, 0.0, gamma_R, 0.0)
    trim, _ = _trim_state(V_R, gamma_R, sc, vel)
    y0 = replace(trim, V=V_R + dV, gamma=gamma_R + dgamma, theta=trim.theta + dgamma).as_tuple()
    # closed-loop vector: plant (6), theta_hat (2), phi_hat (6), flapping phase
    z = np.concatenate([y0, vel.theta_hat, att.phi_hat, [0.0]]).astype(float)

    def evaluate(z):
        state = FlightState(*z[:6])
        vel.theta_hat, att.phi_hat = z[6:8], z[8:14]
        vcmd = control.velocity_feedback(state.V, state.gamma, state.alpha, refs, vel, gains, p_ctrl, coeffs)
        k = math.pi * vcmd.f * p_ctrl.c / state.V
        acmd = control.attitude_feedback(state, k, refs, att, gains, p_ctrl, coeffs)
        dz = np.empty(15)
        kernels.derivative(p_plant, z[:6], vcmd.f, acmd.delta_e, math.sin(z[14]), averaged, aero_model, V_FLOOR, dz[:6])
        dz[6:8] = control.velocity_adapt(vcmd.e, state.alpha, refs, vel, gains, p_ctrl)
        ph_dot = control.attitude_adapt(state.V, acmd.e3_tilde, acmd.psi, gains, p_ctrl, coeffs)
        dz[8:14] = control.project(att.phi_hat, ph_dot, acmd.psi, gains.eps, Gamma_proj, p_ctrl)
        dz[14] = 2.0 * math.pi * sc.freq_scale * vcmd.f
        return dz, state, k, vcmd, acmd

    names = ("t", "V", "gamma", "alpha", "q", "f", "delta_e", "e", "e1", "e3_tilde", "phi_psi", "W", "W3",
             "f_sat", "de_sat", "theta_hat_0", "theta_hat_1",
             "phi_hat_0", "phi_hat_1", "phi_hat_2", "phi_hat_3", "phi_hat_4", "phi_hat_5")
    rows = []
    dt = sc.dt
    n = int(round(duration / dt))
    for i in range(n + 1):
        k1, state, k, vcmd, acmd = evaluate(z)
        rows.append((i * dt, state.V, state.gamma, state.alpha, state.q, vcmd.f, acmd.delta_e,
                     vcmd.e, acmd.e1, acmd.e3_tilde, acmd.phi_psi,
                     control.lyapunov_W(vcmd.e, z[6:8], gains, coeffs),
                     control.lyapunov_W3(acmd, state, refs, k, z[8:14], gains, p_ctrl, coeffs),
                     float(vcmd.saturated), float(acmd.saturated), *z[6:14]))
        if i == n:
            break
        if integrator == "euler":
            z = z + dt * k1
        else:
            k2 = evaluate(z + 0.5 * dt * k1)[0]
            k3 = evaluate(z + 0.5 * dt * k2)[0]
            k4 = evaluate(z + dt * k3)[0]
            z = z + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    data = np.array(rows, dtype=float)
    return SimLog({c: data[:, j] for j, c in enumerate(names)},
                  meta={"scenario": sc.name, "mode": sc.mode.value, "dt": dt, "status": "regulation"})


def _metrics(log: SimLog, sol: PerchSolution, sc: Scenario, status: str, err) -> PerchMetrics:
    nan = float("nan")
    if len(log) == 0:
        return PerchMetrics(status, nan, nan, nan, nan, nan, nan, nan, nan, nan, False, sol.VP, err)
    i = len(log) - 1
    dx = log["x"][i] - sc.boundary.xP
    dz = log["z"][i] - sc.boundary.zP
    pos = math.hypot(dx, dz) if status == "perched" else nan
    V = log["V"][i]
    est = np.column_stack([log[c] for c in log.names if c.startswith(("theta_hat_", "phi_hat_"))])
    bounded = bool(np.all(np.isfinite(est)) and np.max(np.abs(est)) < _BOUND)
    return PerchMetrics(
        status=status,
        position_error=pos,
        vertical_error=abs(dz) if status == "perched" else nan,
        speed=V,
        speed_error=abs(V - sol.VP) / sol.VP,
        gamma=log["gamma"][i],
        t_perch=log["t"][i],
        V_rmse=float(np.sqrt(np.mean((log["V"] - log["V_R"]) ** 2))),
        gamma_rmse=float(np.sqrt(np.mean((log["gamma"] - log["gamma_R"]) ** 2))),
        max_phi_psi=float(np.max(np.abs(log["phi_psi"]))),
        estimates_bounded=bounded,
        VP_planned=sol.VP,
        error=err,
    )


# ---------------------------------------------------------------- sweeps


@dataclass(frozen=True)
class GapPoint:
    scale: float
    theta_gap: float
    gamma_gap: float
    epsilon: float  # slow/fast ratio at the scaled mean flapping rate

    @property
    def gap(self) -> float:
        return max(self.theta_gap, self.gamma_gap)


def averaging_gap(sc: Scenario, frequency_scales: Sequence[float] = (1.0, 2.0, 4.0, 8.0), path=None) -> list[GapPoint]:
    """Max (theta, gamma) deviation between flapping and averaged closed loops.

    The averaged run is shared; each full run speeds up the flapping phase by
    its scale while the aerodynamic reduced frequency is left unchanged.
    Deviations are taken over the common sample prefix.
    """
    sol = sc.solution()
    avg_log, _ = run_closed_loop(replace(sc, mode=ModelMode.AVERAGED, freq_scale=1.0), sol)
    eo = control.epsilon_omega(sc.params)
    out = []
    for s in frequency_scales:
        full_log, _ = run_closed_loop(replace(sc, mode=ModelMode.FULL, freq_scale=float(s)), sol)
        n = min(len(full_log), len(avg_log))
        th = float(np.max(np.abs(full_log["theta"][:n] - avg_log["theta"][:n])))
        ga = float(np.max(np.abs(full_log["gamma"][:n] - avg_log["gamma"][:n])))
        omega = 2.0 * math.pi * float(s) * float(np.mean(full_log["f"][:n]))
        out.append(GapPoint(float(s), th, ga, eo / omega if omega > 0 else float("inf")))
    if path is not None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["scale", "theta_gap", "gamma_gap", "gap", "epsilon", "epsilon_omega"])
            for g in out:
                w.writerow([g.scale, g.theta_gap, g.gamma_gap, g.gap, g.epsilon, eo])
    return out


@dataclass(frozen=True)
class RobustnessCell:
    label: str
    theta_init_scale: float
    phi_init_scale: float
    mass_scale: float
    cg_offset: float
    metrics: PerchMetrics | None
    failure: str = ""


def robustness_sweep(
    sc: Scenario,
    init_scales: Iterable[float] = (0.0, 0.5, 2.0),
    mass_scales: Iterable[float] = (),
    cg_offsets: Iterable[float] = (),
    path=None,
) -> list[RobustnessCell]:
    """Rerun ``sc`` with perturbed initial estimates and plant mass / CG.

    Each initial-estimate scale multiplies both adaptive estimates at t=0.
    Failed cells are recorded and the sweep continues.
    """
    sol = sc.solution()
    cells = []
    plan = [(f"init x{s:g}", dict(theta_init_scale=float(s), phi_init_scale=float(s))) for s in init_scales]
    plan += [(f"mass x{s:g}", dict(mass_scale=float(s))) for s in mass_scales]
    plan += [(f"cg {d:+g} m", dict(cg_offset=float(d))) for d in cg_offsets]
    for label, kw in plan:
        run = replace(sc, **kw)
        try:
            _, m = run_closed_loop(run, sol)
            cells.append(RobustnessCell(label, run.theta_init_scale, run.phi_init_scale, run.mass_scale, run.cg_offset, m))
        except PerchkitError as exc:
            cells.append(RobustnessCell(label, run.theta_init_scale, run.phi_init_scale, run.mass_scale, run.cg_offset, None, str(exc)))
    if path is not None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["label", "theta_init_scale", "phi_init_scale", "mass_scale", "cg_offset",
                        "status", "position_error", "speed_error", "estimates_bounded", "failure"])
            for c in cells:
                m = c.metrics
                w.writerow([c.label, c.theta_init_scale, c.phi_init_scale, c.mass_scale, c.cg_offset,
                            m.status if m else "failed", m.position_error if m else "", m.speed_error if m else "",
                            m.estimates_bounded if m else "", c.failure])
    return cells


DECOMPOSITION_COLUMNS = ("t", "C_T", "CT_prop", "CT_adapt", "CT_grav", "CT_ff",
                         "delta_e", "de_arcsin", "de_rate", "de_alpha")


def control_decomposition(log: SimLog, path=None) -> dict[str, np.ndarray]:
    """Per-term split of the thrust demand and the tail command."""
    missing = [c for c in DECOMPOSITION_COLUMNS if c not in log]
    if missing:
        raise ArgumentError(f"log lacks controller internals: {', '.join(missing)}")
    out = {c: np.asarray(log[c]) for c in DECOMPOSITION_COLUMNS}
    if path is not None:
        SimLog(out).to_csv(path)
    return out
