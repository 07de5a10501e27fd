"""
One-dimensional scenario description: grid, material, boundary data, loads
and initial fields, all built from named time and space built-ins.

A data field is the product time(t)·space(x). Boundary data are pure
functions of time. Nothing here evaluates user expressions, so a scenario is
fully described by its parameters and reproducible from a config file.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import ScenarioError
from .geometry import IntervalSurface

LOG = logging.getLogger(__name__)

TIME_KINDS = ("constant", "linear", "exponential", "sinusoid")
SPACE_KINDS = ("constant", "linear", "sine", "cosine", "sinh", "cosh")
BOUNDARY_MODES = ("dirichlet", "neumann")

# sampling used by the load and consistency checks
CHECK_TIMES = 64
CHECK_TOL = 1e-8


@dataclass(frozen=True)
class TimeFunction:
    """
    Named time built-in.

        constant:     amplitude
        linear:       offset + amplitude·t
        exponential:  amplitude·exp(rate·t)
        sinusoid:     offset + amplitude·sin(rate·t + phase)
    """
    kind: str = "constant"
    amplitude: float = 0.0
    rate: float = 1.0
    offset: float = 0.0
    phase: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in TIME_KINDS:
            raise ValueError(f"plastiflow: unknown time kind '{self.kind}' (expected one of {TIME_KINDS})")

    def __call__(self, t: float) -> float:
        if self.kind == "constant":
            return self.amplitude
        if self.kind == "linear":
            return self.offset + self.amplitude * t
        if self.kind == "exponential":
            return self.amplitude * math.exp(self.rate * t)
        return self.offset + self.amplitude * math.sin(self.rate * t + self.phase)

    def rate_of_change(self, t: float) -> float:
        if self.kind == "constant":
            return 0.0
        if self.kind == "linear":
            return self.amplitude
        if self.kind == "exponential":
            return self.amplitude * self.rate * math.exp(self.rate * t)
        return self.amplitude * self.rate * math.cos(self.rate * t + self.phase)

    @property
    def is_zero(self) -> bool:
        if self.kind == "constant":
            return self.amplitude == 0.0
        if self.kind in ("linear", "sinusoid"):
            return self.amplitude == 0.0 and self.offset == 0.0
        return self.amplitude == 0.0


@dataclass(frozen=True)
class SpaceProfile:
    """
    Named space built-in.

        constant:  amplitude
        linear:    offset + amplitude·x
        sine, cosine, sinh, cosh:  offset + amplitude·fn(wavenumber·x)
    """
    kind: str = "constant"
    amplitude: float = 0.0
    wavenumber: float = 1.0
    offset: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in SPACE_KINDS:
            raise ValueError(f"plastiflow: unknown space kind '{self.kind}' (expected one of {SPACE_KINDS})")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        k, a = self.wavenumber, self.amplitude
        if self.kind == "constant":
            return np.full_like(x, a)
        if self.kind == "linear":
            return self.offset + a * x
        fn = {"sine": np.sin, "cosine": np.cos, "sinh": np.sinh, "cosh": np.cosh}[self.kind]
        return self.offset + a * fn(k * x)

    def derivative(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        k, a = self.wavenumber, self.amplitude
        if self.kind == "constant":
            return np.zeros_like(x)
        if self.kind == "linear":
            return np.full_like(x, a)
        if self.kind == "sine":
            return a * k * np.cos(k * x)
        if self.kind == "cosine":
            return -a * k * np.sin(k * x)
        if self.kind == "sinh":
            return a * k * np.cosh(k * x)
        return a * k * np.sinh(k * x)

    @property
    def is_zero(self) -> bool:
        return self.amplitude == 0.0 and (self.kind == "constant" or self.offset == 0.0)


@dataclass(frozen=True)
class FieldSpec:
    """Separable space-time field time(t)·space(x)."""
    time: TimeFunction = field(default_factory=lambda: TimeFunction("constant", 0.0))
    space: SpaceProfile = field(default_factory=lambda: SpaceProfile("constant", 1.0))

    def at(self, t: float, x: np.ndarray) -> np.ndarray:
        return self.time(t) * self.space(x)

    def rate(self, t: float, x: np.ndarray) -> np.ndarray:
        return self.time.rate_of_change(t) * self.space(x)

    def gradient(self, t: float, x: np.ndarray) -> np.ndarray:
        return self.time(t) * self.space.derivative(x)

    @property
    def is_zero(self) -> bool:
        return self.time.is_zero or self.space.is_zero


@dataclass(frozen=True)
class BoundaryCondition:
    """Dirichlet displacement w(t) or Neumann traction g(t) at one endpoint."""
    mode: str = "dirichlet"
    data: TimeFunction = field(default_factory=TimeFunction)

    def __post_init__(self) -> None:
        if self.mode not in BOUNDARY_MODES:
            raise ValueError(f"plastiflow: boundary mode must be one of {BOUNDARY_MODES}, got '{self.mode}'")

    @property
    def is_dirichlet(self) -> bool:
        return self.mode == "dirichlet"


@dataclass(frozen=True)
class Grid1D:
    """Uniform collocated grid on [0, length]."""
    length: float = 1.0
    nx: int = 200

    def __post_init__(self) -> None:
        if self.nx < 16:
            raise ValueError(f"plastiflow: grid needs nx >= 16, got {self.nx}")
        if not self.length > 0.0:
            raise ValueError(f"plastiflow: grid length must be positive, got {self.length}")

    @property
    def dx(self) -> float:
        return self.length / (self.nx - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.nx)


@dataclass(frozen=True)
class Scenario:
    """
    Complete 1D problem: compliance a (the 1D elastic operator, unit density),
    yield interval, boundary data, body force f, load potential ρ and
    initial fields.

    v0 and u0 default to the linear lift of ẇ(0) and w(0) when left unset.
    """
    grid: Grid1D = field(default_factory=Grid1D)
    compliance: float = 1.0
    surface: IntervalSurface = field(default_factory=IntervalSurface)
    left: BoundaryCondition = field(default_factory=BoundaryCondition)
    right: BoundaryCondition = field(default_factory=BoundaryCondition)
    body_force: FieldSpec = field(default_factory=FieldSpec)
    load_potential: Optional[FieldSpec] = None
    safe_load_margin: Optional[float] = None
    sigma0: SpaceProfile = field(default_factory=SpaceProfile)
    v0: Optional[SpaceProfile] = None
    u0: Optional[SpaceProfile] = None
    require_equilibrium: bool = False
    t_end: float = 1.0

    def __post_init__(self) -> None:
        if not self.compliance > 0.0:
            raise ValueError(f"plastiflow: compliance must be positive, got {self.compliance}")

    # -- boundary lift -------------------------------------------------------

    def _ends(self, t: float, rate: bool) -> Tuple[Optional[float], Optional[float]]:
        def value(bc: BoundaryCondition) -> Optional[float]:
            if not bc.is_dirichlet:
                return None
            return bc.data.rate_of_change(t) if rate else bc.data(t)
        return value(self.left), value(self.right)

    def lift(self, t: float, x: Optional[np.ndarray] = None, rate: bool = False) -> np.ndarray:
        """Linear interpolation of the Dirichlet data (or its rate) into the interior."""
        x = self.grid.x if x is None else np.asarray(x, dtype=float)
        w0, wl = self._ends(t, rate)
        if w0 is None and wl is None:
            return np.zeros_like(x)
        if w0 is None:
            w0 = wl
        if wl is None:
            wl = w0
        s = x / self.grid.length
        return w0 * (1.0 - s) + wl * s  # type: ignore[operator]

    def lift_slope(self, t: float, rate: bool = False) -> float:
        w0, wl = self._ends(t, rate)
        if w0 is None or wl is None:
            return 0.0
        return (wl - w0) / self.grid.length

    def wall_displacement(self, t: float) -> Tuple[Optional[float], Optional[float]]:
        return self._ends(t, rate=False)

    def wall_velocity(self, t: float) -> Tuple[Optional[float], Optional[float]]:
        return self._ends(t, rate=True)

    # -- loads ---------------------------------------------------------------

    @property
    def has_neumann(self) -> bool:
        return not (self.left.is_dirichlet and self.right.is_dirichlet)

    def force(self, t: float) -> np.ndarray:
        return self.body_force.at(t, self.grid.x)

    def rho(self, t: float) -> np.ndarray:
        if self.load_potential is None:
            return np.zeros(self.grid.nx)
        return self.load_potential.at(t, self.grid.x)

    def rho_rate(self, t: float) -> np.ndarray:
        if self.load_potential is None:
            return np.zeros(self.grid.nx)
        return self.load_potential.rate(t, self.grid.x)

    def load_margin(self, times: np.ndarray) -> float:
        """r_K − max|ρ| over the given times and all nodes."""
        worst = max(float(np.max(np.abs(self.rho(float(t))))) for t in times)
        return self.surface.r_k - worst

    # -- initial data --------------------------------------------------------

    def initial_fields(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(σ₀, v₀, u₀) at the grid nodes."""
        x = self.grid.x
        sigma = self.sigma0(x)
        v = self.v0(x) if self.v0 is not None else self.lift(0.0, x, rate=True)
        u = self.u0(x) if self.u0 is not None else self.lift(0.0, x)
        return sigma, v, u

    # -- validation ----------------------------------------------------------

    def validate(self, t_end: Optional[float] = None) -> None:
        """
        Check every scenario invariant.

        Raises:
            ScenarioError: naming the first violated invariant.
        """
        horizon = self.t_end if t_end is None else t_end
        times = np.linspace(0.0, horizon, CHECK_TIMES)
        x = self.grid.x

        if self.load_potential is None and (self.has_neumann or not self.body_force.is_zero):
            raise ScenarioError(
                "safe-load: a load potential is required when f != 0 or a Neumann end is present"
            )

        # ρ must stay inside K by the declared margin, or by some positive one
        c = self.safe_load_margin
        if c is not None and not c > 0.0:
            raise ScenarioError(f"safe-load: margin must be positive, got {c}")
        room = self.load_margin(times)
        if c is None and not room > CHECK_TOL:
            raise ScenarioError(f"safe-load margin violated: r_K - max|rho| = {room:.4g} leaves no room")
        if c is not None and room < c - CHECK_TOL:
            raise ScenarioError(f"safe-load margin violated: r_K - max|rho| = {room:.4g} < c = {c:.4g}")
        # ρ must balance f and match tractions
        for t in times:
            rho = self.rho(float(t))
            worst = float(np.max(np.abs(rho)))
            if self.load_potential is not None:
                residual = -self.load_potential.gradient(float(t), x) - self.force(float(t))
                if float(np.max(np.abs(residual))) > 1e-6 * (1.0 + worst):
                    raise ScenarioError(f"load potential does not balance the body force at t={t:.4g}")
                for bc, idx in ((self.left, 0), (self.right, -1)):
                    if not bc.is_dirichlet and abs(rho[idx] - bc.data(float(t))) > 1e-6 * (1.0 + worst):
                        raise ScenarioError(f"load potential does not match the traction at t={t:.4g}")

        sigma, v, _ = self.initial_fields()
        w_rate = self.wall_velocity(0.0)
        for end, idx, name in ((w_rate[0], 0, "left"), (w_rate[1], -1, "right")):
            if end is not None and abs(v[idx] - end) > CHECK_TOL * (1.0 + abs(end)):
                raise ScenarioError(
                    f"compatibility: v0 = {v[idx]:.6g} differs from the {name} wall velocity {end:.6g}"
                )

        outside = np.asarray(self.surface.project(sigma).distance)
        if float(np.max(outside)) > 1e-12:
            raise ScenarioError(
                f"initial stress leaves K (max distance {float(np.max(outside)):.3e})"
            )

        if self.require_equilibrium:
            residual = -self.sigma0.derivative(x) - self.force(0.0)
            if float(np.max(np.abs(residual[1:-1]))) > 10.0 * self.grid.dx**2 + CHECK_TOL:
                raise ScenarioError("equilibrium: -sigma0' != f(0) at interior nodes")
        LOG.debug("scenario validated (nx=%d, a=%g, c=%g)", self.grid.nx, self.compliance, c)
