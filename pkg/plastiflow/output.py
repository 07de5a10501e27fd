"""
CSV and JSON artifacts.

Every field CSV shares one schema (UTF-8, header row, '.' decimal):

    t, x, sigma, v, u, p, d_sigma, energy_residual

Stationary output appends a boundary_gap column. Floats are written with
repr precision, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, Union

import numpy as np

from .dynamic import RunResult, State1D
from .exact import EvolutionaryExact, StationaryExact, evolutionary_eval, stationary_eval
from .geometry import IntervalSurface
from .quasistatic import QsResult, StationaryResult

LOG = logging.getLogger(__name__)

FIELD_COLUMNS = ("t", "x", "sigma", "v", "u", "p", "d_sigma", "energy_residual")
PROBE_COLUMNS = ("t", "x", "sigma", "v", "u")

PathLike = Union[str, Path]


def canonical_json(value: Any) -> str:
    """Key-sorted JSON, stable across runs."""
    return json.dumps(value, sort_keys=True, indent=2, default=_default, ensure_ascii=False)


def _default(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.bool_):
        return bool(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def digest(value: Any, length: int = 12) -> str:
    """Short SHA-256 of the canonical JSON form of value."""
    payload = json.dumps(value, sort_keys=True, separators=(",", ":"), default=_default)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:length]


def write_json(path: PathLike, payload: Any) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(canonical_json(payload) + "\n", encoding="utf-8")
    LOG.debug("wrote %s", out)
    return out


def _write_rows(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[float]]) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])
    LOG.debug("wrote %s", out)
    return out


def state_rows(
    state: State1D, x: np.ndarray, surface: IntervalSurface, energy_residual: float
) -> List[List[float]]:
    d = np.asarray(surface.project(state.sigma).distance)
    return [
        [state.t, x[i], state.sigma[i], state.v[i], state.u[i], state.p[i], d[i], energy_residual]
        for i in range(x.size)
    ]


def write_trajectory_csv(
    path: PathLike, result: RunResult, x: np.ndarray, surface: IntervalSurface
) -> Path:
    """Snapshot fields of a dynamic run; the final state is always included."""
    states = list(result.snapshots)
    if not states or states[-1].t != result.final.t:
        states.append(result.final)
    rows: List[List[float]] = []
    for s in states:
        residual = float(np.interp(s.t, result.times, result.energy_residuals))
        rows.extend(state_rows(s, x, surface, residual))
    return _write_rows(path, FIELD_COLUMNS, rows)


def write_probe_csv(path: PathLike, result: RunResult) -> Path:
    rows = []
    for xp in sorted(result.probes):
        series = result.probes[xp]
        for k, t in enumerate(result.times):
            rows.append([t, xp, series["sigma"][k], series["v"][k], series["u"][k]])
    return _write_rows(path, PROBE_COLUMNS, rows)


def write_quasistatic_csv(
    path: PathLike, result: QsResult, surface: IntervalSurface, times: Sequence[float] = ()
) -> Path:
    x = result.scenario.grid.x
    wanted = sorted(times) if times else [float(result.times[-1])]
    rows: List[List[float]] = []
    for t in wanted:
        k = int(np.argmin(np.abs(result.times - t)))
        sigma, v, u, p = result.fields_at(k)
        state = State1D(t=float(result.times[k]), sigma=sigma, v=v, u=u, p=p)
        rows.extend(state_rows(state, x, surface, float(result.energy_residuals[k])))
    return _write_rows(path, FIELD_COLUMNS, rows)


def write_stationary_csv(path: PathLike, result: StationaryResult, surface: IntervalSurface) -> Path:
    d = np.asarray(surface.project(result.sigma).distance)
    gap = result.boundary_gap
    rows = [
        [0.0, result.x[i], result.sigma[i], 0.0, result.u[i], result.p[i], d[i], 0.0, gap]
        for i in range(result.x.size)
    ]
    return _write_rows(path, FIELD_COLUMNS + ("boundary_gap",), rows)


def write_exact_csv(
    path: PathLike,
    solution: Union[StationaryExact, EvolutionaryExact],
    x: np.ndarray,
    times: Optional[Sequence[float]] = None,
) -> Path:
    """Closed-form fields in the solver schema (p is the absolutely continuous density)."""
    rows: List[List[float]] = []
    if isinstance(solution, StationaryExact):
        f = stationary_eval(solution, x)
        rows = [[0.0, x[i], f.sigma[i], f.velocity[i], f.u[i], f.p_density[i], 0.0, 0.0]
                for i in range(x.size)]
    else:
        for t in (times or [solution.t_end]):
            f = evolutionary_eval(solution, float(t), x)
            rows.extend([t, x[i], f.sigma[i], f.velocity[i], f.u[i], f.p_density[i], 0.0, 0.0]
                        for i in range(x.size))
    return _write_rows(path, FIELD_COLUMNS, rows)
