"""
Command-line front end.

    plastiflow dynamic --scenario scenarios/exponential_pull.cfg --alpha 0.1 --nx 400
    plastiflow exact --scenario scenarios/exponential_pull.cfg --grid 200
    plastiflow sweep --scenario scenarios/exponential_pull.cfg --out runs/exponential_pull
    plastiflow verify-geometry --surface hosford --p 4 --samples 10000

Exit status: 0 on success, 1 on invalid input, 2 on solver failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

import numpy as np

from .config import RunSpec, apply_overrides, build_plan, load_config, reference_solution
from .dynamic import run
from .errors import PlastiflowError, SolveFailure
from .exact import verify_exact_solution
from .geometry import (
    HillEllipsoid,
    HosfordSurface,
    IntervalSurface,
    VonMisesBall,
    YieldSurface,
    estimate_curvature,
    verify_projection_axioms,
)
from .lab import run_sweep
from .output import (
    canonical_json,
    digest,
    write_exact_csv,
    write_json,
    write_probe_csv,
    write_quasistatic_csv,
    write_stationary_csv,
    write_trajectory_csv,
)
from .potential import RegularizedPotential, verify_gradient_inequalities
from .quasistatic import qs_evolve, solve_stationary

LOG = logging.getLogger("plastiflow")

COMMANDS = ("dynamic", "quasistatic", "stationary", "exact", "sweep", "verify-geometry")
SURFACES = ("interval", "von_mises", "hill", "hosford")


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"[error] {self.prog}: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="plastiflow",
        description="Norton-Hoff regularized perfect plasticity: solvers, closed forms and limit sweeps.",
    )
    parser.add_argument("--verbose", "-v", action="count", default=0, help="More logging (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("dynamic", "quasistatic", "stationary", "exact", "sweep"):
        cmd = sub.add_parser(name)
        cmd.add_argument("--scenario", type=Path, required=True, help="Scenario file (INI)")
        cmd.add_argument("--out", type=Path, default=Path("out"), help="Output directory (default: out)")
        cmd.add_argument("--alpha", type=_positive_float, default=None)
        cmd.add_argument("--lam", type=_positive_float, default=None)
        cmd.add_argument("--nx", type=_positive_int, default=None)
        cmd.add_argument("--dt", type=_positive_float, default=None)
        cmd.add_argument("--t-end", dest="t_end", type=_positive_float, default=None)
        if name == "exact":
            cmd.add_argument("--grid", type=_positive_int, default=None, help="Number of grid nodes")
        if name == "sweep":
            cmd.add_argument("--workers", type=_positive_int, default=None)

    geo = sub.add_parser("verify-geometry")
    geo.add_argument("--surface", choices=SURFACES, default="von_mises")
    geo.add_argument("--n", type=int, default=3)
    geo.add_argument("--p", type=float, default=4.0, help="Hosford exponent")
    geo.add_argument("--radius", type=_positive_float, default=1.0)
    geo.add_argument("--scale", type=_positive_float, default=1.0, help="Hosford calibration scale")
    geo.add_argument("--b", default=None, help="Hill B matrix, row-major, comma-separated")
    geo.add_argument("--alpha", type=_positive_float, default=0.1)
    geo.add_argument("--lam", type=_positive_float, default=1000.0)
    geo.add_argument("--samples", type=_positive_int, default=1000)
    geo.add_argument("--seed", type=int, default=0)
    geo.add_argument("--out", type=Path, default=None, help="Also write the report here")
    return parser


def configure_logging(verbose: int) -> None:
    level_name = os.environ.get("PLASTIFLOW_LOG_LEVEL")
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    elif level_name:
        level = getattr(logging, level_name.upper(), logging.WARNING)
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _load(args: argparse.Namespace, solver: Optional[str] = None) -> RunSpec:
    spec = load_config(args.scenario)
    spec = apply_overrides(spec, alpha=args.alpha, lam=args.lam, nx=args.nx, dt=args.dt, t_end=args.t_end)
    if solver is not None and spec.solver != solver:
        spec = replace(spec, solver=solver)
    spec.scenario.validate(spec.t_end)
    return spec


def _potential(spec: RunSpec) -> RegularizedPotential:
    return RegularizedPotential(spec.alpha, spec.lam, spec.scenario.surface)


def cmd_dynamic(args: argparse.Namespace) -> Dict[str, Any]:
    spec = _load(args, "dynamic")
    sc = spec.scenario
    windows = list(spec.windows) or [(0.2, 0.8)]
    result = run(sc, _potential(spec), spec.time_step, spec.t_end,
                 probes=spec.probes, snapshots=spec.snapshots, windows=windows)
    out: Path = args.out
    files = [str(write_trajectory_csv(out / "trajectory.csv", result, sc.grid.x, sc.surface))]
    if spec.probes:
        files.append(str(write_probe_csv(out / "probes.csv", result)))
    files.append(str(write_json(out / "ledger.json", result.ledger.to_dict())))
    return {
        "command": "dynamic",
        "alpha": spec.alpha,
        "lambda": spec.lam,
        "steps": len(result.times) - 1,
        "supDistance": result.sup_distance,
        "flowResidual": result.flow_residual,
        "energyResidual": result.ledger.relative_residual,
        "seminorms": {f"{lo}:{hi}": result.sup_seminorm((lo, hi)) for lo, hi in windows},
        "files": files,
    }


def cmd_quasistatic(args: argparse.Namespace) -> Dict[str, Any]:
    spec = _load(args, "quasistatic")
    pot = _potential(spec)
    result = qs_evolve(spec.scenario, pot, spec.time_step, spec.t_end)
    path = write_quasistatic_csv(args.out / "quasistatic.csv", result, pot.surface, spec.snapshots)
    return {
        "command": "quasistatic",
        "alpha": spec.alpha,
        "lambda": spec.lam,
        "thetaFinal": float(result.theta[-1]),
        "energyResidual": result.max_energy_residual,
        "files": [str(path)],
    }


def cmd_stationary(args: argparse.Namespace) -> Dict[str, Any]:
    spec = _load(args, "stationary")
    pot = _potential(spec)
    result = solve_stationary(spec.scenario, pot)
    path = write_stationary_csv(args.out / "stationary.csv", result, pot.surface)
    return {
        "command": "stationary",
        "alpha": spec.alpha,
        "lambda": spec.lam,
        "sigmaRight": float(result.sigma[-1]),
        "plasticMass": result.plastic_mass,
        "boundaryGap": result.boundary_gap,
        "files": [str(path)],
    }


def cmd_exact(args: argparse.Namespace) -> Dict[str, Any]:
    spec = _load(args)
    solution = reference_solution(spec)
    if solution is None:
        raise ValueError(
            "plastiflow: scenario has no closed form (needs K=[-1,1], a=1, w(0)=0 and "
            "w(L) constant or a*exp(t))"
        )
    nodes = args.grid or spec.scenario.grid.nx
    x = np.linspace(0.0, spec.scenario.grid.length, nodes)
    times = list(spec.snapshots) or None
    path = write_exact_csv(args.out / "exact.csv", solution, x, times)
    report = verify_exact_solution(solution)
    write_json(args.out / "exact.json", report.to_dict())
    return {"command": "exact", "kind": type(solution).__name__, "audit": report.to_dict(), "files": [str(path)]}


def cmd_sweep(args: argparse.Namespace) -> Dict[str, Any]:
    spec = _load(args)
    plan = build_plan(spec)
    report = run_sweep(plan, out_dir=args.out, max_workers=args.workers)
    summary = report.to_dict()
    failures = report.failures
    if failures:
        first = failures[0]
        raise SolveFailure(first.error or "cell failed", cell_id=first.cell_id)
    summary["command"] = "sweep"
    return summary


def make_surface(args: argparse.Namespace) -> YieldSurface:
    if args.surface == "interval":
        return IntervalSurface(-args.radius, args.radius)
    if args.surface == "von_mises":
        return VonMisesBall(n=args.n, radius=args.radius)
    if args.surface == "hosford":
        return HosfordSurface(n=args.n, p=args.p, scale=args.scale)
    m = args.n * (args.n + 1) // 2 - 1
    if args.b is None:
        return HillEllipsoid.from_array(args.n, np.eye(m))
    values = [float(v) for v in args.b.replace(" ", "").split(",") if v]
    if len(values) != m * m:
        raise ValueError(f"plastiflow: Hill B for n={args.n} needs {m * m} entries, got {len(values)}")
    return HillEllipsoid.from_array(args.n, np.asarray(values).reshape(m, m))


def cmd_verify_geometry(args: argparse.Namespace) -> Dict[str, Any]:
    surface = make_surface(args)
    axioms = verify_projection_axioms(surface, samples=args.samples, seed=args.seed)
    curvature = estimate_curvature(surface, samples=args.samples, seed=args.seed)
    pot = RegularizedPotential(args.alpha, args.lam, surface)
    inequalities = verify_gradient_inequalities(pot, samples=args.samples, seed=args.seed)
    summary = {
        "command": "verify-geometry",
        "surface": repr(surface),
        "rK": surface.r_k,
        "RK": surface.R_k,
        "projection": axioms.to_dict(),
        "curvature": {
            "minQuotient": curvature.value,
            "samples": curvature.samples,
            "applicable": curvature.applicable,
            "note": curvature.note,
        },
        "gradientInequalities": inequalities.to_dict(),
    }
    if args.out is not None:
        write_json(args.out / "geometry.json", summary)
    return summary


HANDLERS = {
    "dynamic": cmd_dynamic,
    "quasistatic": cmd_quasistatic,
    "stationary": cmd_stationary,
    "exact": cmd_exact,
    "sweep": cmd_sweep,
    "verify-geometry": cmd_verify_geometry,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    configure_logging(args.verbose)

    try:
        summary = HANDLERS[args.command](args)
    except ValueError as err:
        print(f"[error] {err}", file=sys.stderr)
        return 1
    except SolveFailure as err:
        print(f"[solver-failure] cell {err.cell_id}: {err}", file=sys.stderr)
        return 2
    except PlastiflowError as err:
        print(f"[solver-failure] {type(err).__name__}: {err}", file=sys.stderr)
        return 2

    summary["digest"] = digest(summary)
    print(canonical_json(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
