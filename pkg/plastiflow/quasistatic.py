"""
Quasi-static evolution through its scalar ODE reduction, and the stationary
Norton-Hoff two-point problem.

With both ends Dirichlet, f ≡ 0 and ρ ≡ 0 the divergence-free stresses on
(0, L) are the constants, so σ(t, x) = θ(t) with

    a·θ̇ = m(t) − Dγ(θ),   m(t) = (ẇ(t, L) − ẇ(t, 0)) / L,

and the velocity is the linear lift of ẇ. The stationary problem is

    σ'' = a·σ + Dγ(σ),   σ'(0) = w(0),   σ'(L) = a_bc,   u = σ'.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.linalg import solve_banded

from .dynamic import derivative
from .errors import NewtonDivergence, ReductionUnavailable
from .geometry import IntervalSurface
from .potential import RegularizedPotential, dgamma, fenchel_conjugate, gamma
from .scenario import Scenario

LOG = logging.getLogger(__name__)

NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 100
MAX_HALVINGS = 40
CONTINUATION_BELOW = 0.1
CONTINUATION_FACTOR = 0.7
PLASTIC_WINDOW = 0.95


# ---------------------------------------------------------------------------
# Quasi-static reduction
# ---------------------------------------------------------------------------

@dataclass
class QsReduction:
    """Data of the scalar reduction on (0, L)."""
    length: float
    compliance: float
    surface: IntervalSurface
    theta0: float

    def forcing(self, scenario: Scenario, t: float) -> float:
        left, right = scenario.wall_velocity(t)
        return (right - left) / self.length  # type: ignore[operator]


def reduce_scenario(scenario: Scenario) -> QsReduction:
    """
    Raises:
        ReductionUnavailable: a Neumann end, a body force, a load potential
            or a non-constant σ₀.
    """
    if scenario.has_neumann:
        raise ReductionUnavailable("quasi-static reduction needs Dirichlet data at both ends")
    if not scenario.body_force.is_zero:
        raise ReductionUnavailable("quasi-static reduction needs f = 0")
    if scenario.load_potential is not None and not scenario.load_potential.is_zero:
        raise ReductionUnavailable("quasi-static reduction needs rho = 0")
    sigma0 = scenario.sigma0(scenario.grid.x)
    if float(np.ptp(sigma0)) > 1e-12 * (1.0 + float(np.max(np.abs(sigma0)))):
        raise ReductionUnavailable("initial stress must be spatially constant")
    return QsReduction(
        length=scenario.grid.length,
        compliance=scenario.compliance,
        surface=scenario.surface,
        theta0=float(sigma0[0]),
    )


@dataclass
class QsResult:
    """Time series of the reduced state; fields are rebuilt on demand."""
    scenario: Scenario
    times: np.ndarray
    theta: np.ndarray
    p: np.ndarray
    dissipation: np.ndarray
    work: np.ndarray
    energy_residuals: np.ndarray

    def fields_at(self, k: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(σ, v, u, p) on the grid at the k-th recorded time; z ≡ 0 so v is the lift of ẇ."""
        sc = self.scenario
        x = sc.grid.x
        t = float(self.times[k])
        _, v0, u0 = sc.initial_fields()
        sigma = np.full_like(x, self.theta[k])
        v = sc.lift(t, rate=True)
        u = u0 + sc.lift(t) - sc.lift(0.0)
        p = np.full_like(x, self.p[k])
        return sigma, v, u, p

    @property
    def max_energy_residual(self) -> float:
        return float(np.max(np.abs(self.energy_residuals)))


def saturation_level(pot: RegularizedPotential, forcing: float) -> float:
    """θ_∞ with Dγ(θ_∞) = m: the distance d_∞ solves g(d)·d = |m|."""
    surface = pot.surface
    if not isinstance(surface, IntervalSurface):
        raise ValueError("plastiflow: saturation level is defined for interval surfaces")
    d = float(pot.profile.inverse_dphi(abs(forcing)))
    return surface.upper + d if forcing >= 0.0 else surface.lower - d


def qs_evolve(
    scenario: Scenario,
    pot: RegularizedPotential,
    dt: float,
    t_end: float,
) -> QsResult:
    """
    Classic RK4 on the augmented state [θ, p, dissipation, work].

    The energy terms ride along in the integrator so that
    ½La·θ² + D − ½La·θ₀² − W inherits fourth-order accuracy.
    """
    if dt <= 0.0 or t_end <= 0.0:
        raise ValueError(f"plastiflow: dt and t_end must be positive, got {dt}, {t_end}")
    red = reduce_scenario(scenario)
    a, length = red.compliance, red.length

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        theta = float(y[0])
        m = red.forcing(scenario, t)
        grad = float(dgamma(pot, theta))
        diss = float(gamma(pot, theta)) + float(fenchel_conjugate(pot, grad))
        return np.array([(m - grad) / a, grad, length * diss, length * m * theta])

    y = np.array([red.theta0, 0.0, 0.0, 0.0])
    energy0 = 0.5 * length * a * red.theta0**2
    n_steps = max(1, int(math.ceil(t_end / dt - 1e-9)))
    times: List[float] = [0.0]
    states: List[np.ndarray] = [y.copy()]
    t = 0.0
    LOG.info("quasi-static run: dt=%.3g steps=%d alpha=%g", dt, n_steps, pot.alpha)
    for _ in range(n_steps):
        h = min(dt, t_end - t)
        if h <= 1e-14:
            break
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += h
        times.append(t)
        states.append(y.copy())

    arr = np.array(states)
    residuals = 0.5 * length * a * arr[:, 0] ** 2 + arr[:, 2] - energy0 - arr[:, 3]
    return QsResult(
        scenario=scenario,
        times=np.array(times),
        theta=arr[:, 0],
        p=arr[:, 1],
        dissipation=arr[:, 2],
        work=arr[:, 3],
        energy_residuals=residuals,
    )


def richardson_order(values: Sequence[float]) -> float:
    """Observed order from three results at steps h, h/2, h/4."""
    if len(values) != 3:
        raise ValueError("plastiflow: Richardson order needs exactly three values")
    coarse = abs(values[0] - values[1])
    fine = abs(values[1] - values[2])
    if fine == 0.0 or coarse == 0.0:
        return math.inf
    return math.log2(coarse / fine)


# ---------------------------------------------------------------------------
# Stationary two-point problem
# ---------------------------------------------------------------------------

@dataclass
class StationaryResult:
    """Converged stationary solve."""
    x: np.ndarray
    sigma: np.ndarray
    u: np.ndarray
    p: np.ndarray
    a_bc: float
    residual: float
    iterations: int
    alpha_path: List[float] = field(default_factory=list)
    max_at_boundary: bool = True

    @property
    def plastic_mass(self) -> float:
        """∫ p over the last 5% of the domain: estimate of the boundary atom."""
        length = float(self.x[-1])
        mask = self.x >= PLASTIC_WINDOW * length - 1e-12
        return float(trapezoid(self.p[mask], self.x[mask]))

    @property
    def boundary_gap(self) -> float:
        """u(L⁻) − a_bc, with u(L⁻) extrapolated from a linear fit on [0.8L, 0.9L]."""
        length = float(self.x[-1])
        mask = (self.x >= 0.8 * length) & (self.x <= 0.9 * length)
        slope, intercept = np.polyfit(self.x[mask], self.u[mask], 1)
        return float(slope * length + intercept - self.a_bc)


def _stationary_residual(
    pot: RegularizedPotential, sigma: np.ndarray, dx: float, a: float, w0: float, a_bc: float
) -> np.ndarray:
    lap = np.empty_like(sigma)
    lap[1:-1] = sigma[:-2] - 2.0 * sigma[1:-1] + sigma[2:]
    # ghost nodes carry σ'(0) = w0 and σ'(L) = a_bc
    lap[0] = 2.0 * (sigma[1] - sigma[0]) - 2.0 * dx * w0
    lap[-1] = 2.0 * (sigma[-2] - sigma[-1]) + 2.0 * dx * a_bc
    return lap - dx * dx * (a * sigma + np.asarray(dgamma(pot, sigma)))


def _newton(
    pot: RegularizedPotential,
    sigma: np.ndarray,
    dx: float,
    a: float,
    w0: float,
    a_bc: float,
) -> Tuple[np.ndarray, float, int]:
    n = sigma.size
    res = _stationary_residual(pot, sigma, dx, a, w0, a_bc)
    norm = float(np.max(np.abs(res)))
    for it in range(1, NEWTON_MAX_ITER + 1):
        if norm <= NEWTON_TOL:
            return sigma, norm, it - 1
        h = 1e-7 * (1.0 + np.abs(sigma))
        ddg = (np.asarray(dgamma(pot, sigma + h)) - np.asarray(dgamma(pot, sigma))) / h
        ab = np.zeros((3, n))
        ab[0, 1:] = 1.0
        ab[1, :] = -2.0 - dx * dx * (a + ddg)
        ab[2, :-1] = 1.0
        ab[0, 1] = 2.0
        ab[2, n - 2] = 2.0
        delta = solve_banded((1, 1), ab, -res)
        t = 1.0
        for _ in range(MAX_HALVINGS):
            trial = sigma + t * delta
            trial_res = _stationary_residual(pot, trial, dx, a, w0, a_bc)
            trial_norm = float(np.max(np.abs(trial_res)))
            if np.isfinite(trial_norm) and trial_norm < norm:
                break
            t *= 0.5
        else:
            raise NewtonDivergence(f"line search stalled at residual {norm:.3e} (alpha={pot.alpha})")
        sigma, res, norm = trial, trial_res, trial_norm
    if norm <= NEWTON_TOL:
        return sigma, norm, NEWTON_MAX_ITER
    raise NewtonDivergence(f"no convergence in {NEWTON_MAX_ITER} iterations (residual {norm:.3e})")


def _alpha_ladder(target: float) -> List[float]:
    ladder = [1.0]
    while ladder[-1] * CONTINUATION_FACTOR > target:
        ladder.append(ladder[-1] * CONTINUATION_FACTOR)
    if ladder[-1] != target:
        ladder.append(target)
    return ladder


def solve_stationary(scenario: Scenario, pot: RegularizedPotential) -> StationaryResult:
    """
    Damped Newton on the dx²-scaled central-difference system; below α = 0.1,
    or when the direct solve fails, path-follow in α from α = 1.

    Raises:
        NewtonDivergence: continuation could not reach the requested α.
    """
    if scenario.has_neumann:
        raise ValueError("plastiflow: stationary problem needs Dirichlet data at both ends")
    grid = scenario.grid
    dx, a = grid.dx, scenario.compliance
    w0, a_bc = scenario.wall_displacement(0.0)
    assert w0 is not None and a_bc is not None

    sigma = np.zeros(grid.nx)
    path: List[float] = []
    iterations = 0
    if pot.alpha >= CONTINUATION_BELOW:
        try:
            sigma, norm, iterations = _newton(pot, sigma, dx, a, w0, a_bc)
            path = [pot.alpha]
        except NewtonDivergence:
            LOG.info("direct Newton failed at alpha=%g, switching to continuation", pot.alpha)
            path = []
    if not path:
        sigma = np.zeros(grid.nx)
        for alpha in _alpha_ladder(pot.alpha):
            stage = replace(pot, alpha=alpha)
            sigma, norm, its = _newton(stage, sigma, dx, a, w0, a_bc)
            iterations += its
            path.append(alpha)
            LOG.debug("continuation stage alpha=%.4g: %d iterations", alpha, its)

    u = derivative(sigma, dx)
    u[0], u[-1] = w0, a_bc
    p = np.asarray(dgamma(pot, sigma))
    max_at_boundary = True
    if a_bc > 0.0 and float(sigma[-1]) < float(np.max(sigma)) - 1e-10:
        max_at_boundary = False
        LOG.warning("stationary stress maximum is not attained at x = L (a_bc=%g)", a_bc)
    return StationaryResult(
        x=grid.x,
        sigma=sigma,
        u=u,
        p=p,
        a_bc=a_bc,
        residual=norm,
        iterations=iterations,
        alpha_path=path,
        max_at_boundary=max_at_boundary,
    )
