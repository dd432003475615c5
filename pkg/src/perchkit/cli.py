"""Command-line entry point: plan, simulate, map, feasibility, fidelity.

Exit codes: 0 success, 2 infeasible, 64 usage or configuration error,
70 internal invariant breach (for example an aborted closed-loop run).
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .aero import model_fidelity_report
from .config import Config, load_config
from .errors import ArgumentError, PerchkitError
from .planner import ManeuverBoundary, ReferenceTrajectory, region_map, solve_optimal
from .sim import run_closed_loop

__all__ = ["main", "EXIT_OK", "EXIT_INFEASIBLE", "EXIT_USAGE", "EXIT_INTERNAL"]

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_USAGE = 64
EXIT_INTERNAL = 70

CASE_COLORS = {0: "#d9d9d9", 1: "#9ecae1", 2: "#fdae6b", 3: "#a1d99b", 4: "#bcbddc", 5: "#fc9272", 6: "#fdd0a2"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _out_dir(args, cfg: Config) -> Path:
    path = args.out or os.environ.get("PERCHKIT_OUT") or cfg.output_dir or "perchkit_out"
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _plot_setup():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "perchkit"
    return plt


def _save_svg(fig, path: Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})


# ---------------------------------------------------------------- commands


def cmd_plan(args) -> int:
    cfg = load_config(args.config)
    boundary = ManeuverBoundary(math.radians(args.gamma0_deg), args.v0, args.xp, args.zp)
    sol = solve_optimal(boundary, cfg.feasibility(), args.strategy)
    if sol is None:
        print("infeasible: no trajectory satisfies the perching constraints")
        return EXIT_INFEASIBLE
    ref = ReferenceTrajectory(boundary, sol)
    out = _out_dir(args, cfg)
    ref.to_csv(out / "reference.csv")
    print(f"case {sol.case}")
    print(f"gammaP = {sol.gammaP:.6f} rad ({math.degrees(sol.gammaP):.3f} deg)")
    print(f"VP = {sol.VP:.6f} m/s")
    print(f"VdotD = {sol.VdotD:.6f} m/s^2")
    print(f"gammadotT = {sol.gammadotT:.6f} rad/s")
    print(f"T_P = {sol.T_P:.6f} s")
    print(f"reference written to {out / 'reference.csv'}")
    return EXIT_OK


def _metrics_csv(path: Path, name: str, metrics) -> None:
    row = {"scenario": name, **metrics.as_row()}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(row))
        w.writerow([repr(v) if isinstance(v, float) else v for v in row.values()])


def _plot_run(log, name: str, path: Path) -> None:
    plt = _plot_setup()
    fig, axes = plt.subplots(3, 1, figsize=(6, 7), sharex=True)
    t = log["t"]
    axes[0].plot(log["x"], log["z"], label="flown")
    axes[0].plot(log["x"], log["z_R"], "--", label="reference")
    axes[0].set_ylabel("z [m] vs x")
    axes[0].legend()
    axes[1].plot(t, log["V"], label="V")
    axes[1].plot(t, log["V_R"], "--", label="V_R")
    axes[1].set_ylabel("V [m/s]")
    axes[2].plot(t, log["gamma"], label="gamma")
    axes[2].plot(t, log["gamma_R"], "--", label="gamma_R")
    axes[2].set_ylabel("gamma [rad]")
    axes[2].set_xlabel("t [s]")
    fig.suptitle(name)
    _save_svg(fig, path)
    plt.close(fig)


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    names = [args.scenario] if args.scenario else (cfg.run or ["drogon-12"])
    out = _out_dir(args, cfg)
    code = EXIT_OK
    for name in names:
        sc = cfg.scenario(name, mode=args.mode)
        try:
            sol = sc.solution()
        except ArgumentError as exc:
            print(f"{name}: infeasible ({exc})")
            code = max(code, EXIT_INFEASIBLE)
            continue
        log, m = run_closed_loop(sc, sol)
        log.to_csv(out / f"{name}_log.csv")
        _metrics_csv(out / f"{name}_metrics.csv", name, m)
        if not args.no_plot:
            _plot_run(log, name, out / f"{name}.svg")
        if m.perched:
            print(f"{name}: perched, perch error {m.position_error:.4f} m, "
                  f"speed {m.speed:.3f} m/s (planned {m.VP_planned:.3f}), mode {sc.mode.value}")
        else:
            print(f"{name}: {m.status} at t = {m.t_perch:.3f} s, mode {sc.mode.value}")
            code = EXIT_INTERNAL
    return code


def cmd_map(args) -> int:
    cfg = load_config(args.config)
    if args.nx < 1 or args.nz < 1:
        raise UsageError("grid sizes must be at least 1")
    if (args.nx > 1 and not args.x_max > args.x_min) or (args.nz > 1 and not args.z_max > args.z_min):
        raise UsageError("grid bounds span zero area")
    xs = np.linspace(args.x_min, args.x_max, args.nx) if args.nx > 1 else np.array([args.x_min])
    zs = np.linspace(args.z_min, args.z_max, args.nz) if args.nz > 1 else np.array([args.z_min])
    out = _out_dir(args, cfg)
    rows = region_map(xs, zs, math.radians(args.gamma0_deg), args.v0, cfg.feasibility(), out / "region.csv", args.strategy)
    counts = {}
    for r in rows:
        counts[r[2]] = counts.get(r[2], 0) + 1
    if not args.no_plot:
        plt = _plot_setup()
        from matplotlib.colors import ListedColormap

        grid = np.array([r[2] for r in rows], dtype=float).reshape(len(zs), len(xs))
        cmap = ListedColormap([CASE_COLORS[i] for i in range(7)])
        fig, ax = plt.subplots(figsize=(7, 4))
        dx = (xs[1] - xs[0]) / 2 if len(xs) > 1 else 0.5
        dz = (zs[1] - zs[0]) / 2 if len(zs) > 1 else 0.5
        ax.imshow(grid, origin="lower", cmap=cmap, vmin=-0.5, vmax=6.5, aspect="auto",
                  extent=(xs[0] - dx, xs[-1] + dx, zs[0] - dz, zs[-1] + dz), interpolation="nearest")
        ax.plot([0.0], [0.0], "k*", markersize=10)
        ax.set_xlabel("x0 [m] (perch at origin)")
        ax.set_ylabel("z0 [m]")
        ax.set_title(f"optimal case, gamma0 = {args.gamma0_deg:g} deg, V0 = {args.v0:g} m/s")
        _save_svg(fig, out / "region.svg")
        plt.close(fig)
    summary = ", ".join(f"case {c}: {n}" for c, n in sorted(counts.items()))
    print(f"{len(rows)} grid points ({summary}); written to {out / 'region.csv'}")
    return EXIT_OK


def cmd_feasibility(args) -> int:
    cfg = load_config(args.config)
    lim = cfg.feasibility()
    lo, hi = lim.gammaP_mec_range
    print(f"F1 stall speed V_s = {lim.V_s:.4f} m/s, minimum perch speed VP_min = {lim.VP_min:.4f} m/s")
    print(f"F2 deceleration limit VdotD_min = {lim.VdotD_min:.4f} m/s^2")
    print(f"F3 turn-rate limit gammadotT_max = {lim.gammadotT_max:.4f} rad/s")
    print(f"F4 mechanical perch angle range = [{math.degrees(lo):.2f}, {math.degrees(hi):.2f}] deg")
    if args.xp is not None:
        b = ManeuverBoundary(math.radians(args.gamma0_deg), args.v0, args.xp, args.zp)
        klo, khi = lim.gammaP_kin_range(b)
        print(f"F5 kinematic perch angle range = [{math.degrees(klo):.2f}, {math.degrees(khi):.2f}] deg")
    else:
        print("F5 kinematic range needs a boundary (--xp, --zp)")
    return EXIT_OK


def cmd_fidelity(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    rep = model_fidelity_report(coeffs=cfg.aero(), path=out / "fidelity.csv")
    print(f"lift: rmse {rep.lift_rmse:.5f}, relative {100 * rep.lift_relative:.2f} %")
    print(f"drag: rmse {rep.drag_rmse:.5f}, relative {100 * rep.drag_relative:.2f} %")
    print(f"{rep.n_points} grid points; written to {out / 'fidelity.csv'}")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="perchkit", description="Perching maneuver planning and closed-loop simulation.")
    p.add_argument("--version", action="version", version=f"perchkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="flat YAML configuration file")
        sp.add_argument("--out", help="output directory (overrides PERCHKIT_OUT and the config)")

    sp = sub.add_parser("plan", help="solve the optimal two-phase perching trajectory")
    common(sp)
    sp.add_argument("--gamma0-deg", type=float, required=True)
    sp.add_argument("--v0", type=float, required=True)
    sp.add_argument("--xp", type=float, required=True)
    sp.add_argument("--zp", type=float, required=True)
    sp.add_argument("--strategy", choices=("midpoint", "lower-edge", "upper-edge"), default="midpoint")
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("simulate", help="fly a scenario in closed loop")
    common(sp)
    sp.add_argument("--scenario", help="scenario id (default: the config's run list, else drogon-12)")
    sp.add_argument("--mode", choices=("full", "averaged"), default=None)
    sp.add_argument("--no-plot", action="store_true")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("map", help="classify start points by optimal case")
    common(sp)
    sp.add_argument("--gamma0-deg", type=float, default=math.degrees(-0.65))
    sp.add_argument("--v0", type=float, default=6.0)
    sp.add_argument("--x-min", type=float, default=-30.0)
    sp.add_argument("--x-max", type=float, default=-1.0)
    sp.add_argument("--nx", type=int, default=30)
    sp.add_argument("--z-min", type=float, default=-5.0)
    sp.add_argument("--z-max", type=float, default=15.0)
    sp.add_argument("--nz", type=int, default=21)
    sp.add_argument("--strategy", choices=("midpoint", "lower-edge", "upper-edge"), default="midpoint")
    sp.add_argument("--no-plot", action="store_true")
    sp.set_defaults(func=cmd_map)

    sp = sub.add_parser("feasibility", help="print the F1-F5 limits")
    common(sp)
    sp.add_argument("--gamma0-deg", type=float, default=math.degrees(-0.65))
    sp.add_argument("--v0", type=float, default=6.0)
    sp.add_argument("--xp", type=float, default=None)
    sp.add_argument("--zp", type=float, default=0.0)
    sp.set_defaults(func=cmd_feasibility)

    sp = sub.add_parser("fidelity", help="full vs reduced wing model RMSE")
    common(sp)
    sp.set_defaults(func=cmd_fidelity)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except ArgumentError as exc:
        print(f"perchkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PerchkitError as exc:
        print(f"perchkit: internal invariant breach: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
