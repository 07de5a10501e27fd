"""
Scenario files.

INI-style text read with configparser. Sections:

    [scenario]        length, nx, compliance, require_equilibrium, safe_load_margin
    [surface]         kind = interval, lower, upper
    [potential]       alpha, lambda
    [left] [right]    mode (dirichlet | neumann), kind, amplitude, rate, offset, phase
    [body_force]      time_* and space_* built-in parameters
    [load_potential]  same keys as [body_force]; omit for ρ ≡ 0
    [initial]         sigma_*, v_*, u_* space built-ins; omit v_/u_ for the boundary lift
    [run]             solver, dt, t_end, probes, snapshots, windows, seed
    [sweep]           alphas, lambdas

dump_config(parse_config(text)) re-parses to an identical RunSpec.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .exact import EvolutionaryExact, StationaryExact
from .geometry import IntervalSurface
from .lab import SOLVERS, SweepPlan
from .scenario import (
    BoundaryCondition,
    FieldSpec,
    Grid1D,
    Scenario,
    SpaceProfile,
    TimeFunction,
)

Window = Tuple[float, float]


@dataclass(frozen=True)
class RunSpec:
    """Everything a command needs: scenario, potential parameters and run controls."""
    scenario: Scenario
    alpha: float = 0.1
    lam: float = 1000.0
    solver: str = "dynamic"
    dt: Optional[float] = None
    t_end: float = 1.0
    probes: Tuple[float, ...] = ()
    snapshots: Tuple[float, ...] = ()
    windows: Tuple[Window, ...] = ()
    seed: int = 0
    sweep_alphas: Tuple[float, ...] = ()
    sweep_lams: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.solver not in SOLVERS:
            raise ValueError(f"plastiflow: solver must be one of {SOLVERS}, got '{self.solver}'")
        if not self.t_end > 0.0:
            raise ValueError(f"plastiflow: t_end must be positive, got {self.t_end}")

    @property
    def time_step(self) -> float:
        grid = self.scenario.grid
        return self.dt if self.dt is not None else 0.9 * grid.dx * math.sqrt(self.scenario.compliance)


def apply_overrides(
    spec: RunSpec,
    alpha: Optional[float] = None,
    lam: Optional[float] = None,
    nx: Optional[int] = None,
    dt: Optional[float] = None,
    t_end: Optional[float] = None,
) -> RunSpec:
    """Return spec with the given command-line overrides applied."""
    changes: Dict[str, object] = {}
    if alpha is not None:
        changes["alpha"] = alpha
    if lam is not None:
        changes["lam"] = lam
    if dt is not None:
        changes["dt"] = dt
    scenario = spec.scenario
    if nx is not None:
        scenario = replace(scenario, grid=replace(scenario.grid, nx=nx))
    if t_end is not None:
        changes["t_end"] = t_end
        scenario = replace(scenario, t_end=t_end)
    changes["scenario"] = scenario
    return replace(spec, **changes)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _floats(text: str) -> Tuple[float, ...]:
    return tuple(float(v) for v in text.replace(",", " ").split())


def _windows(text: str) -> Tuple[Window, ...]:
    out = []
    for item in text.replace(",", " ").split():
        lo, _, hi = item.partition(":")
        if not hi:
            raise ValueError(f"plastiflow: window '{item}' must look like lo:hi")
        out.append((float(lo), float(hi)))
    return tuple(out)


def _time(section: configparser.SectionProxy, prefix: str = "") -> TimeFunction:
    return TimeFunction(
        kind=section.get(f"{prefix}kind", "constant"),
        amplitude=section.getfloat(f"{prefix}amplitude", 0.0),
        rate=section.getfloat(f"{prefix}rate", 1.0),
        offset=section.getfloat(f"{prefix}offset", 0.0),
        phase=section.getfloat(f"{prefix}phase", 0.0),
    )


def _space(section: configparser.SectionProxy, prefix: str, default_amplitude: float = 0.0) -> SpaceProfile:
    return SpaceProfile(
        kind=section.get(f"{prefix}kind", "constant"),
        amplitude=section.getfloat(f"{prefix}amplitude", default_amplitude),
        wavenumber=section.getfloat(f"{prefix}wavenumber", 1.0),
        offset=section.getfloat(f"{prefix}offset", 0.0),
    )


def _field(section: configparser.SectionProxy) -> FieldSpec:
    return FieldSpec(time=_time(section, "time_"), space=_space(section, "space_", 1.0))


def _boundary(parser: configparser.ConfigParser, name: str) -> BoundaryCondition:
    if not parser.has_section(name):
        return BoundaryCondition()
    section = parser[name]
    return BoundaryCondition(mode=section.get("mode", "dirichlet"), data=_time(section))


def parse_config(text: str) -> RunSpec:
    """
    Parse scenario-file text.

    Raises:
        ValueError: unknown built-in, malformed number or missing [scenario].
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ValueError(f"plastiflow: malformed scenario file: {exc}") from exc
    if not parser.has_section("scenario"):
        raise ValueError("plastiflow: scenario file needs a [scenario] section")

    sc = parser["scenario"]
    surf = parser["surface"] if parser.has_section("surface") else None
    if surf is not None and surf.get("kind", "interval") != "interval":
        raise ValueError("plastiflow: 1D scenarios use an interval surface")
    surface = IntervalSurface(
        lower=surf.getfloat("lower", -1.0) if surf is not None else -1.0,
        upper=surf.getfloat("upper", 1.0) if surf is not None else 1.0,
    )

    run = parser["run"] if parser.has_section("run") else None
    t_end = run.getfloat("t_end", 1.0) if run is not None else 1.0

    initial = parser["initial"] if parser.has_section("initial") else None
    sigma0 = _space(initial, "sigma_") if initial is not None else SpaceProfile()
    v0 = _space(initial, "v_") if initial is not None and initial.get("v_kind") else None
    u0 = _space(initial, "u_") if initial is not None and initial.get("u_kind") else None

    margin = sc.get("safe_load_margin")
    scenario = Scenario(
        grid=Grid1D(length=sc.getfloat("length", 1.0), nx=sc.getint("nx", 200)),
        compliance=sc.getfloat("compliance", 1.0),
        surface=surface,
        left=_boundary(parser, "left"),
        right=_boundary(parser, "right"),
        body_force=_field(parser["body_force"]) if parser.has_section("body_force") else FieldSpec(),
        load_potential=_field(parser["load_potential"]) if parser.has_section("load_potential") else None,
        safe_load_margin=float(margin) if margin else None,
        sigma0=sigma0,
        v0=v0,
        u0=u0,
        require_equilibrium=sc.getboolean("require_equilibrium", False),
        t_end=t_end,
    )

    pot = parser["potential"] if parser.has_section("potential") else None
    sweep = parser["sweep"] if parser.has_section("sweep") else None
    dt = run.get("dt") if run is not None else None
    return RunSpec(
        scenario=scenario,
        alpha=pot.getfloat("alpha", 0.1) if pot is not None else 0.1,
        lam=pot.getfloat("lambda", 1000.0) if pot is not None else 1000.0,
        solver=run.get("solver", "dynamic") if run is not None else "dynamic",
        dt=float(dt) if dt else None,
        t_end=t_end,
        probes=_floats(run.get("probes", "")) if run is not None else (),
        snapshots=_floats(run.get("snapshots", "")) if run is not None else (),
        windows=_windows(run.get("windows", "")) if run is not None else (),
        seed=run.getint("seed", 0) if run is not None else 0,
        sweep_alphas=_floats(sweep.get("alphas", "")) if sweep is not None else (),
        sweep_lams=_floats(sweep.get("lambdas", "")) if sweep is not None else (),
    )


def load_config(path: Union[str, Path]) -> RunSpec:
    p = Path(path)
    if not p.is_file():
        raise ValueError(f"plastiflow: scenario file '{p}' does not exist")
    return parse_config(p.read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _fmt(value: float) -> str:
    return repr(float(value))


def _join(values: Tuple[float, ...]) -> str:
    return ", ".join(_fmt(v) for v in values)


def _time_items(tf: TimeFunction, prefix: str = "") -> Dict[str, str]:
    return {
        f"{prefix}kind": tf.kind,
        f"{prefix}amplitude": _fmt(tf.amplitude),
        f"{prefix}rate": _fmt(tf.rate),
        f"{prefix}offset": _fmt(tf.offset),
        f"{prefix}phase": _fmt(tf.phase),
    }


def _space_items(sp: SpaceProfile, prefix: str) -> Dict[str, str]:
    return {
        f"{prefix}kind": sp.kind,
        f"{prefix}amplitude": _fmt(sp.amplitude),
        f"{prefix}wavenumber": _fmt(sp.wavenumber),
        f"{prefix}offset": _fmt(sp.offset),
    }


def _field_items(fs: FieldSpec) -> Dict[str, str]:
    return {**_time_items(fs.time, "time_"), **_space_items(fs.space, "space_")}


def dump_config(spec: RunSpec) -> str:
    """Serialize a RunSpec to scenario-file text."""
    sc = spec.scenario
    parser = configparser.ConfigParser(interpolation=None)
    scenario_items = {
        "length": _fmt(sc.grid.length),
        "nx": str(sc.grid.nx),
        "compliance": _fmt(sc.compliance),
        "require_equilibrium": "true" if sc.require_equilibrium else "false",
    }
    if sc.safe_load_margin is not None:
        scenario_items["safe_load_margin"] = _fmt(sc.safe_load_margin)
    parser["scenario"] = scenario_items
    parser["surface"] = {"kind": "interval", "lower": _fmt(sc.surface.lower), "upper": _fmt(sc.surface.upper)}
    parser["potential"] = {"alpha": _fmt(spec.alpha), "lambda": _fmt(spec.lam)}
    for name, bc in (("left", sc.left), ("right", sc.right)):
        parser[name] = {"mode": bc.mode, **_time_items(bc.data)}
    parser["body_force"] = _field_items(sc.body_force)
    if sc.load_potential is not None:
        parser["load_potential"] = _field_items(sc.load_potential)
    initial = _space_items(sc.sigma0, "sigma_")
    if sc.v0 is not None:
        initial.update(_space_items(sc.v0, "v_"))
    if sc.u0 is not None:
        initial.update(_space_items(sc.u0, "u_"))
    parser["initial"] = initial
    run_items = {
        "solver": spec.solver,
        "t_end": _fmt(spec.t_end),
        "probes": _join(spec.probes),
        "snapshots": _join(spec.snapshots),
        "windows": ", ".join(f"{_fmt(lo)}:{_fmt(hi)}" for lo, hi in spec.windows),
        "seed": str(spec.seed),
    }
    if spec.dt is not None:
        run_items["dt"] = _fmt(spec.dt)
    parser["run"] = run_items
    if spec.sweep_alphas or spec.sweep_lams:
        parser["sweep"] = {"alphas": _join(spec.sweep_alphas), "lambdas": _join(spec.sweep_lams)}

    lines: List[str] = []
    for section in parser.sections():
        lines.append(f"[{section}]")
        for key, value in parser[section].items():
            lines.append(f"{key} = {value}".rstrip())
        lines.append("")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Derived objects
# ---------------------------------------------------------------------------

def reference_solution(spec: RunSpec) -> Optional[Union[StationaryExact, EvolutionaryExact]]:
    """
    Closed form matching the scenario, if it is one of the two model problems:
    K = [−1, 1], a = 1, w(0) = 0, and w(L) constant (stationary) or a·eᵗ.
    """
    sc = spec.scenario
    right, left = sc.right.data, sc.left.data
    if (sc.surface.lower, sc.surface.upper) != (-1.0, 1.0) or sc.compliance != 1.0:
        return None
    if sc.has_neumann or not left.is_zero:
        return None
    if right.kind == "constant":
        return StationaryExact(length=sc.grid.length, a_bc=right.amplitude)
    if right.kind == "exponential" and right.rate == 1.0:
        try:
            return EvolutionaryExact(length=sc.grid.length, a=right.amplitude, t_end=spec.t_end)
        except ValueError:
            return None
    return None


def build_plan(spec: RunSpec) -> SweepPlan:
    """SweepPlan from the [sweep] section (one λ is broadcast over all α)."""
    if not spec.sweep_alphas:
        raise ValueError("plastiflow: scenario file has no [sweep] alphas")
    lams = spec.sweep_lams or (spec.lam,)
    if len(lams) == 1:
        lams = lams * len(spec.sweep_alphas)
    if len(lams) != len(spec.sweep_alphas):
        raise ValueError("plastiflow: [sweep] needs one lambda or one per alpha")
    windows = spec.windows or ((0.2, 0.8), (0.95, 1.0))
    return SweepPlan(
        scenario=replace(spec.scenario, t_end=spec.t_end),
        cells=tuple(zip(spec.sweep_alphas, lams)),
        solver=spec.solver,
        dt=spec.dt,
        t_end=spec.t_end,
        window=windows[0],
        boundary_window=windows[1] if len(windows) > 1 else None,
        probes=spec.probes,
        reference=reference_solution(spec),
        seed=spec.seed,
    )
