"""
(α, λ) sweeps and the limit diagnostics measured along them.

Cells are independent solves. They run on a thread pool (numpy releases the
GIL in its kernels) driven from asyncio, and are merged into a LimitReport
after all of them finish. A failing cell is recorded and the sweep goes on.
"""

from __future__ import annotations

import asyncio
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import trapezoid

from .dynamic import RunResult, StepIncrement, boundary_gap, interior_h1_seminorm, run
from .errors import PlastiflowError, SolveFailure
from .exact import EvolutionaryExact, StationaryExact, evolutionary_eval, stationary_eval
from .geometry import IntervalSurface
from .output import digest, write_json, write_quasistatic_csv, write_stationary_csv, write_trajectory_csv
from .potential import RegularizedPotential, verify_gradient_inequalities
from .quasistatic import qs_evolve, solve_stationary
from .scenario import Scenario

LOG = logging.getLogger(__name__)

SOLVERS = ("dynamic", "quasistatic", "stationary")
TREND_SLACK = 0.10
SEMINORM_RATIO = 10.0
LAYER_FACTOR = 5.0


@dataclass(frozen=True)
class SweepPlan:
    """
    Ordered (α, λ) ladder over one scenario.

    α must decrease strictly and λ must not decrease along the plan. The
    boundary window is measured on the field that carries the jump at x = L:
    v for dynamic cells, u for stationary ones.
    """
    scenario: Scenario
    cells: Tuple[Tuple[float, float], ...]
    solver: str = "dynamic"
    dt: Optional[float] = None
    t_end: float = 1.0
    window: Tuple[float, float] = (0.2, 0.8)
    boundary_window: Optional[Tuple[float, float]] = (0.95, 1.0)
    probes: Tuple[float, ...] = ()
    reference: Optional[Union[StationaryExact, EvolutionaryExact]] = None
    seed: int = 0
    inequality_samples: int = 200

    def __post_init__(self) -> None:
        if self.solver not in SOLVERS:
            raise ValueError(f"plastiflow: solver must be one of {SOLVERS}, got '{self.solver}'")
        if not self.cells:
            raise ValueError("plastiflow: sweep plan needs at least one (alpha, lambda) cell")
        for (a0, l0), (a1, l1) in zip(self.cells, self.cells[1:]):
            if not a1 < a0:
                raise ValueError(f"plastiflow: alpha must decrease strictly along the plan ({a0} -> {a1})")
            if l1 < l0:
                raise ValueError(f"plastiflow: lambda must not decrease along the plan ({l0} -> {l1})")
        lo, hi = self.window
        if not (0.0 < lo < hi < self.scenario.grid.length):
            raise ValueError(f"plastiflow: window {self.window} must lie strictly inside (0, L)")

    @property
    def time_step(self) -> float:
        grid = self.scenario.grid
        return self.dt if self.dt is not None else 0.9 * grid.dx * math.sqrt(self.scenario.compliance)


def cell_id(plan: SweepPlan, alpha: float, lam: float) -> str:
    """Short SHA-256 of everything that determines a cell's result."""
    grid = plan.scenario.grid
    return digest({
        "solver": plan.solver,
        "alpha": alpha,
        "lambda": lam,
        "nx": grid.nx,
        "length": grid.length,
        "dt": plan.time_step,
        "t_end": plan.t_end,
        "scenario": repr(plan.scenario),
        "seed": plan.seed,
    })


@dataclass
class CellReport:
    """Diagnostics of one (α, λ) cell."""
    cell_id: str
    alpha: float
    lam: float
    ok: bool = True
    error: Optional[str] = None
    sup_distance: float = math.nan
    flow_residual: float = math.nan
    h1_interior: float = math.nan
    h1_interior_v: float = math.nan
    h1_boundary: float = math.nan
    boundary_layer_width: float = math.nan
    energy_residual: float = math.nan
    est_uniform_scaled: float = math.nan
    boundary_gap: float = math.nan
    plastic_mass: float = math.nan
    inequality_slack: float = math.nan
    csv_path: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cellId": self.cell_id,
            "alpha": self.alpha,
            "lambda": self.lam,
            "ok": self.ok,
            "error": self.error,
            "supDistance": _finite(self.sup_distance),
            "flowResidual": _finite(self.flow_residual),
            "h1Interior": _finite(self.h1_interior),
            "h1InteriorVelocity": _finite(self.h1_interior_v),
            "h1Boundary": _finite(self.h1_boundary),
            "boundaryLayerWidth": _finite(self.boundary_layer_width),
            "energyResidual": _finite(self.energy_residual),
            "estUniformScaled": _finite(self.est_uniform_scaled),
            "boundaryGap": _finite(self.boundary_gap),
            "plasticMass": _finite(self.plastic_mass),
            "inequalitySlack": _finite(self.inequality_slack),
            "csv": self.csv_path,
        }


def _finite(value: float) -> Optional[float]:
    return float(value) if math.isfinite(value) else None


@dataclass
class LimitReport:
    """Cells of a sweep plus the trend checks across them."""
    cells: List[CellReport] = field(default_factory=list)
    distance_trend_ok: bool = True
    flow_trend_ok: bool = True
    seminorm_ratio: float = math.nan
    seminorm_bounded: bool = True
    boundary_seminorm_ratio: float = math.nan
    est_constant: float = math.nan

    @property
    def failures(self) -> List[CellReport]:
        return [c for c in self.cells if not c.ok]

    @property
    def boundary_contrast(self) -> bool:
        """The boundary window degrades faster along the ladder than the interior."""
        return self.boundary_seminorm_ratio > self.seminorm_ratio

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cells": [c.to_dict() for c in self.cells],
            "distanceTrendOk": self.distance_trend_ok,
            "flowTrendOk": self.flow_trend_ok,
            "seminormRatio": _finite(self.seminorm_ratio),
            "seminormBounded": self.seminorm_bounded,
            "boundarySeminormRatio": _finite(self.boundary_seminorm_ratio),
            "boundaryContrast": self.boundary_contrast,
            "estConstant": _finite(self.est_constant),
            "failures": [c.cell_id for c in self.failures],
        }


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

def flow_rule_residual(increments: Sequence[StepIncrement], surface: IntervalSurface) -> float:
    """
    max over interior nodes and steps of |H(Δp) − σ⁺·Δp| / |Δp|, where |Δp| > 1e-14.

    Zero for an elastic trajectory.
    """
    worst = 0.0
    for inc in increments:
        dp = inc.dp[1:-1]
        sigma = inc.sigma[1:-1]
        active = np.abs(dp) > 1e-14
        if not np.any(active):
            continue
        h = surface.support_array(dp[active])
        worst = max(worst, float(np.max(np.abs(h - sigma[active] * dp[active]) / np.abs(dp[active]))))
    return worst


def boundary_layer_width(x: np.ndarray, u: np.ndarray, u_exact: np.ndarray, window: Tuple[float, float]) -> float:
    """
    Distance from x = L of the first node (scanning right from the window)
    where |u − u_exact| exceeds five times the error inside the window.
    """
    err = np.abs(u - u_exact)
    inside = (x >= window[0]) & (x <= window[1])
    reference = max(float(np.max(err[inside])), 1e-14)
    beyond = np.nonzero((x > window[1]) & (err > LAYER_FACTOR * reference))[0]
    if beyond.size == 0:
        return 0.0
    return float(x[-1] - x[beyond[0]])


# ---------------------------------------------------------------------------
# Cells
# ---------------------------------------------------------------------------

def _dynamic_cell(plan: SweepPlan, pot: RegularizedPotential, report: CellReport,
                  out_dir: Optional[Path]) -> None:
    sc = plan.scenario
    windows = [plan.window] + ([plan.boundary_window] if plan.boundary_window else [])
    result: RunResult = run(sc, pot, plan.time_step, plan.t_end, probes=plan.probes,
                            windows=windows, record_increments=True)
    x = sc.grid.x
    report.sup_distance = result.sup_distance
    report.flow_residual = flow_rule_residual(result.increments, sc.surface)
    report.h1_interior = result.sup_seminorm(plan.window)
    report.h1_interior_v = result.sup_seminorm(plan.window, "v")
    if plan.boundary_window:
        report.h1_boundary = result.sup_seminorm(plan.boundary_window, "v")
    report.energy_residual = result.ledger.relative_residual
    est = result.diagnostics["est_uniform"]
    report.est_uniform_scaled = pot.alpha * float(trapezoid(est, result.times))
    if isinstance(plan.reference, EvolutionaryExact):
        exact = evolutionary_eval(plan.reference, result.final.t, x)
        report.boundary_layer_width = boundary_layer_width(x, result.final.u, exact.u, plan.window)
    if sc.right.is_dirichlet:
        report.boundary_gap = boundary_gap(result.final, sc)
    if out_dir is not None:
        report.csv_path = str(write_trajectory_csv(out_dir / f"{report.cell_id}.csv", result, x, sc.surface))


def _quasistatic_cell(plan: SweepPlan, pot: RegularizedPotential, report: CellReport,
                      out_dir: Optional[Path]) -> None:
    result = qs_evolve(plan.scenario, pot, plan.time_step, plan.t_end)
    d = np.asarray(pot.surface.project(result.theta).distance)
    report.sup_distance = float(np.max(d))
    report.flow_residual = 0.0
    report.energy_residual = result.max_energy_residual
    if out_dir is not None:
        report.csv_path = str(write_quasistatic_csv(out_dir / f"{report.cell_id}.csv", result, pot.surface))


def _stationary_cell(plan: SweepPlan, pot: RegularizedPotential, report: CellReport,
                     out_dir: Optional[Path]) -> None:
    sc = plan.scenario
    result = solve_stationary(sc, pot)
    x = sc.grid.x
    report.sup_distance = float(np.max(np.asarray(pot.surface.project(result.sigma).distance)))
    report.h1_interior = interior_h1_seminorm(result.sigma, x, plan.window)
    if plan.boundary_window:
        report.h1_boundary = interior_h1_seminorm(result.u, x, plan.boundary_window)
    report.plastic_mass = result.plastic_mass
    report.boundary_gap = result.boundary_gap
    active = np.abs(result.p) > 1e-14
    if np.any(active):
        h = pot.surface.support_array(result.p[active])
        report.flow_residual = float(np.max(np.abs(h - result.sigma[active] * result.p[active])
                                            / np.abs(result.p[active])))
    else:
        report.flow_residual = 0.0
    if isinstance(plan.reference, StationaryExact):
        exact = stationary_eval(plan.reference, x)
        report.boundary_layer_width = boundary_layer_width(x, result.u, exact.u, plan.window)
    if out_dir is not None:
        report.csv_path = str(write_stationary_csv(out_dir / f"{report.cell_id}.csv", result, pot.surface))


_CELL_RUNNERS = {
    "dynamic": _dynamic_cell,
    "quasistatic": _quasistatic_cell,
    "stationary": _stationary_cell,
}


def run_cell(plan: SweepPlan, alpha: float, lam: float, out_dir: Optional[Path] = None) -> CellReport:
    """Run one cell; numerical failures are captured in the report."""
    cid = cell_id(plan, alpha, lam)
    report = CellReport(cell_id=cid, alpha=alpha, lam=lam)
    pot = RegularizedPotential(alpha, lam, plan.scenario.surface)
    try:
        _CELL_RUNNERS[plan.solver](plan, pot, report, out_dir)
        checked = verify_gradient_inequalities(pot, samples=plan.inequality_samples, seed=plan.seed)
        report.inequality_slack = min(checked.slack_sq, checked.slack_rk)
        if not checked.valid:
            LOG.warning("cell %s: %s", cid, checked.error)
    except PlastiflowError as exc:
        failure = SolveFailure(str(exc), cell_id=cid)
        LOG.warning("cell %s (alpha=%g, lambda=%g) failed: %s", cid, alpha, lam, failure)
        report.ok = False
        report.error = f"{type(exc).__name__}: {exc}"
    return report


def summarize(cells: List[CellReport]) -> LimitReport:
    """Trend and boundedness checks over the successful cells, in plan order."""
    report = LimitReport(cells=cells)
    good = [c for c in cells if c.ok]

    for prev, cur in zip(good, good[1:]):
        if cur.sup_distance > (1.0 + TREND_SLACK) * prev.sup_distance + 1e-14:
            report.distance_trend_ok = False
        if math.isfinite(cur.flow_residual) and cur.flow_residual > (1.0 + TREND_SLACK) * prev.flow_residual + 1e-14:
            report.flow_trend_ok = False
    if not report.distance_trend_ok:
        LOG.warning("sup d(sigma) does not decrease along the alpha ladder")

    interior = [c.h1_interior for c in good if math.isfinite(c.h1_interior) and c.h1_interior > 0.0]
    if interior:
        report.seminorm_ratio = max(interior) / min(interior)
        report.seminorm_bounded = report.seminorm_ratio <= SEMINORM_RATIO
    boundary = [c.h1_boundary for c in good if math.isfinite(c.h1_boundary) and c.h1_boundary > 0.0]
    if boundary:
        report.boundary_seminorm_ratio = max(boundary) / min(boundary)

    ratios = [c.est_uniform_scaled / (1.0 + 1.0 / c.alpha) for c in good if math.isfinite(c.est_uniform_scaled)]
    if ratios:
        report.est_constant = max(ratios)
    return report


def _worker_count(requested: Optional[int]) -> int:
    if requested is not None:
        return max(1, requested)
    env = os.environ.get("PLASTIFLOW_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"plastiflow: PLASTIFLOW_THREADS must be an integer, got '{env}'")
    return max(1, min(4, os.cpu_count() or 1))


async def run_sweep_async(
    plan: SweepPlan,
    out_dir: Optional[Union[str, Path]] = None,
    max_workers: Optional[int] = None,
) -> LimitReport:
    """
    Run every cell concurrently and merge the results in plan order.

    Args:
        plan: Validated sweep plan.
        out_dir: When given, per-cell CSVs and report.json are written there.
        max_workers: Thread cap; defaults to PLASTIFLOW_THREADS.
    """
    path = Path(out_dir) if out_dir is not None else None
    loop = asyncio.get_running_loop()
    workers = _worker_count(max_workers)
    LOG.info("sweep: %d cells, solver=%s, %d workers", len(plan.cells), plan.solver, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            loop.run_in_executor(pool, run_cell, plan, alpha, lam, path)
            for alpha, lam in plan.cells
        ]
        cells = list(await asyncio.gather(*futures))
    report = summarize(cells)
    if path is not None:
        write_json(path / "report.json", report.to_dict())
    return report


def run_sweep(
    plan: SweepPlan,
    out_dir: Optional[Union[str, Path]] = None,
    max_workers: Optional[int] = None,
) -> LimitReport:
    """Blocking wrapper around run_sweep_async."""
    return asyncio.run(run_sweep_async(plan, out_dir=out_dir, max_workers=max_workers))


def with_cells(plan: SweepPlan, alphas: Sequence[float], lams: Sequence[float]) -> SweepPlan:
    """Plan with its cells replaced; a single λ is broadcast over all α."""
    if len(lams) == 1:
        lams = list(lams) * len(alphas)
    if len(lams) != len(alphas):
        raise ValueError("plastiflow: alphas and lambdas must have equal length (or one lambda)")
    return replace(plan, cells=tuple(zip(alphas, lams)))
