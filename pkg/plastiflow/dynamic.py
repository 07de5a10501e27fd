"""
Dynamic Norton-Hoff solver on (0, L):

    a·σ̇ + Dγ(σ) = v_x,   v̇ − σ_x = f,   v = ẇ on Dirichlet ends,  σ = g on Neumann ends.

Each step is a Lie splitting: an explicit elastic (leapfrog) substep on a
collocated grid, then a nodewise implicit relaxation of the stiff Dγ term
along the projection ray.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from .errors import CflViolation, RootFindFailure, WindowTooSmall
from .ledger import EnergyLedger
from .potential import RegularizedPotential, dgamma, fenchel_conjugate, gamma
from .scenario import Scenario

LOG = logging.getLogger(__name__)

CFL_SAFETY = 0.9
RELAX_TOL = 1e-12
RELAX_MAX_ITER = 200
GAP_FIT = (0.8, 0.9)


@dataclass
class State1D:
    """Nodal fields at time t; p is the cumulative plastic strain density."""
    t: float
    sigma: np.ndarray
    v: np.ndarray
    u: np.ndarray
    p: np.ndarray
    compliance: float = 1.0

    @property
    def e(self) -> np.ndarray:
        """Elastic strain a·σ."""
        return self.compliance * self.sigma

    def copy(self) -> "State1D":
        return State1D(
            t=self.t,
            sigma=self.sigma.copy(),
            v=self.v.copy(),
            u=self.u.copy(),
            p=self.p.copy(),
            compliance=self.compliance,
        )


def initial_state(scenario: Scenario) -> State1D:
    sigma, v, u = scenario.initial_fields()
    return State1D(
        t=0.0,
        sigma=sigma,
        v=v,
        u=u,
        p=np.zeros_like(sigma),
        compliance=scenario.compliance,
    )


def derivative(values: np.ndarray, dx: float) -> np.ndarray:
    """Central differences inside, second-order one-sided at both ends."""
    out = np.empty_like(values)
    out[1:-1] = (values[2:] - values[:-2]) / (2.0 * dx)
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dx)
    out[-1] = (3.0 * values[-1] - 4.0 * values[-2] + values[-3]) / (2.0 * dx)
    return out


def check_cfl(scenario: Scenario, dt: float) -> None:
    limit = CFL_SAFETY * scenario.grid.dx * math.sqrt(scenario.compliance)
    if dt <= 0.0:
        raise CflViolation(f"time step must be positive, got {dt}")
    if dt > limit * (1.0 + 1e-12):
        raise CflViolation(f"time step {dt:.4g} exceeds the elastic bound 0.9*dx*sqrt(a) = {limit:.4g}")


def _apply_neumann(sigma: np.ndarray, scenario: Scenario, t: float) -> None:
    if not scenario.left.is_dirichlet:
        sigma[0] = scenario.left.data(t)
    if not scenario.right.is_dirichlet:
        sigma[-1] = scenario.right.data(t)


def _apply_dirichlet(v: np.ndarray, scenario: Scenario, t: float) -> None:
    left, right = scenario.wall_velocity(t)
    if left is not None:
        v[0] = left
    if right is not None:
        v[-1] = right


def elastic_substep(state: State1D, scenario: Scenario, dt: float, backward: bool = False) -> State1D:
    """
    Leapfrog elastic update σ* = σ + (dt/a)·v_x, v⁺ = v + dt·(σ*_x + f).

    With backward=True the state is taken at t + dt and the forward update is
    undone exactly (boundary data are reapplied at time t).
    """
    a = scenario.compliance
    dx = scenario.grid.dx
    if not backward:
        t_new = state.t + dt
        sigma = state.sigma + (dt / a) * derivative(state.v, dx)
        _apply_neumann(sigma, scenario, t_new)
        v = state.v + dt * (derivative(sigma, dx) + scenario.force(t_new))
        _apply_dirichlet(v, scenario, t_new)
        return replace(state, t=t_new, sigma=sigma, v=v)

    t_old = state.t - dt
    v = state.v - dt * (derivative(state.sigma, dx) + scenario.force(state.t))
    _apply_dirichlet(v, scenario, t_old)
    sigma = state.sigma - (dt / a) * derivative(v, dx)
    _apply_neumann(sigma, scenario, t_old)
    return replace(state, t=t_old, sigma=sigma, v=v)


def _solve_ray(pot: RegularizedPotential, d_star: np.ndarray, tau: float) -> np.ndarray:
    """Root of d + τ·g(d)·d = d* on [0, d*], vectorized safeguarded Newton."""
    profile = pot.profile
    e = profile.exponent
    lo = np.zeros_like(d_star)
    hi = d_star.copy()
    d = d_star.copy()
    tol = RELAX_TOL * (1.0 + d_star)
    for _ in range(RELAX_MAX_ITER):
        g = np.asarray(profile.g(d))
        h = d + tau * g * d - d_star
        done = (np.abs(h) <= tol) | (hi - lo <= tol)
        if np.all(done):
            return d
        lo = np.where(h < 0.0, d, lo)
        hi = np.where(h > 0.0, d, hi)
        dg = np.where(d < profile.lam, g * 2.0 * e * d / (1.0 + d * d), 0.0)
        slope = 1.0 + tau * (g + dg * d)
        newton = d - h / slope
        inside = (newton > lo) & (newton < hi)
        d = np.where(done, d, np.where(inside, newton, 0.5 * (lo + hi)))
    raise RootFindFailure(f"plastic relaxation did not converge in {RELAX_MAX_ITER} iterations")


def relax_implicit(pot: RegularizedPotential, sigma_star, tau: float):
    """
    Unique σ⁺ with σ⁺ + τ·Dγ(σ⁺) = σ*.

    Works along the projection ray: d(σ⁺) solves d + τ·g(d)·d = d(σ*) and
    σ⁺ = Π(σ*) + (d/d(σ*))·(σ* − Π(σ*)). Nodewise on 1D arrays.
    """
    if not tau > 0.0:
        raise ValueError(f"relaxation step must be positive, got {tau}")
    res = pot.surface.project(sigma_star)
    d_star = np.atleast_1d(np.asarray(res.distance, dtype=float))
    d = _solve_ray(pot, d_star, tau)
    ratio = np.divide(d, d_star, out=np.ones_like(d), where=d_star > 0.0)
    if np.ndim(res.distance) == 0:
        r = float(ratio[0])
        if isinstance(sigma_star, np.ndarray):
            return res.point + r * (sigma_star - res.point)
        return float(res.point + r * (float(sigma_star) - res.point))
    return res.point + ratio * (np.asarray(sigma_star) - res.point)


@dataclass
class StepIncrement:
    """What one step did to the plastic strain."""
    sigma_star: np.ndarray
    sigma: np.ndarray
    dp: np.ndarray


def _advance(
    state: State1D, scenario: Scenario, pot: RegularizedPotential, dt: float
) -> Tuple[State1D, StepIncrement]:
    a = scenario.compliance
    star = elastic_substep(state, scenario, dt)
    sigma = relax_implicit(pot, star.sigma, dt / a)
    d_star = np.asarray(pot.surface.project(star.sigma).distance)
    d_new = np.asarray(pot.surface.project(sigma).distance)
    if np.any(d_new > d_star + 1e-12 * (1.0 + d_star)):
        raise RootFindFailure("plastic relaxation increased the distance to K")
    dp = a * (star.sigma - sigma)
    new = State1D(
        t=star.t,
        sigma=sigma,
        v=star.v,
        u=state.u + dt * star.v,
        p=state.p + dp,
        compliance=a,
    )
    return new, StepIncrement(sigma_star=star.sigma, sigma=sigma, dp=dp)


def step(state: State1D, scenario: Scenario, pot: RegularizedPotential, dt: float) -> State1D:
    """
    One Lie-splitting step: elastic substep, then implicit plastic relaxation.

    Raises:
        CflViolation: dt above 0.9·dx·√a.
    """
    check_cfl(scenario, dt)
    new, _ = _advance(state, scenario, pot, dt)
    return new


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

def _window_mask(x: np.ndarray, window: Tuple[float, float]) -> np.ndarray:
    lo, hi = window
    if not (x[0] <= lo < hi <= x[-1]):
        raise ValueError(f"plastiflow: window {window} must satisfy 0 <= lo < hi <= L")
    mask = (x >= lo - 1e-12) & (x <= hi + 1e-12)
    if int(mask.sum()) < 4:
        raise WindowTooSmall(f"window {window} holds {int(mask.sum())} nodes, need at least 4")
    return mask


def interior_h1_seminorm(values: np.ndarray, x: np.ndarray, window: Tuple[float, float]) -> float:
    """L² norm over the window of the central-difference derivative."""
    mask = _window_mask(x, window)
    grad = derivative(np.asarray(values, dtype=float), float(x[1] - x[0]))
    return math.sqrt(float(trapezoid(grad[mask] ** 2, x[mask])))


def kinematic_residual(state: State1D, dx: float) -> float:
    """‖u_x − a·σ − p‖_∞."""
    return float(np.max(np.abs(derivative(state.u, dx) - state.e - state.p)))


def flow_rule_increments(pot: RegularizedPotential, sigma: np.ndarray, dp: np.ndarray) -> float:
    """Max of |H(Δp) − σ·Δp|/|Δp| over nodes where |Δp| > 1e-14."""
    active = np.abs(dp) > 1e-14
    if not np.any(active):
        return 0.0
    h = pot.surface.support_array(dp[active])
    return float(np.max(np.abs(h - sigma[active] * dp[active]) / np.abs(dp[active])))


def boundary_gap(state: State1D, scenario: Scenario) -> float:
    """
    w(t, L) minus u extrapolated to L⁻ from a linear fit on [0.8L, 0.9L].

    Zero for a solution attaining its Dirichlet datum; positive when a
    plastic boundary layer detaches u from w.
    """
    _, w_right = scenario.wall_displacement(state.t)
    if w_right is None:
        raise ValueError("plastiflow: boundary gap needs a Dirichlet right end")
    x = scenario.grid.x
    length = scenario.grid.length
    mask = (x >= GAP_FIT[0] * length) & (x <= GAP_FIT[1] * length)
    slope, intercept = np.polyfit(x[mask], state.u[mask], 1)
    return float(w_right - (slope * length + intercept))


@dataclass
class RunResult:
    """Trajectory, diagnostics and ledger of one dynamic run."""
    final: State1D
    times: np.ndarray
    ledger: EnergyLedger
    probes: Dict[float, Dict[str, np.ndarray]] = field(default_factory=dict)
    snapshots: List[State1D] = field(default_factory=list)
    diagnostics: Dict[str, np.ndarray] = field(default_factory=dict)
    seminorms: Dict[Tuple[float, float], Dict[str, np.ndarray]] = field(default_factory=dict)
    increments: List[StepIncrement] = field(default_factory=list)
    energy_residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def sup_distance(self) -> float:
        return float(np.max(self.diagnostics["sup_distance"]))

    @property
    def flow_residual(self) -> float:
        return float(np.max(self.diagnostics["flow_residual"]))

    def sup_seminorm(self, window: Tuple[float, float], name: str = "sigma") -> float:
        return float(np.max(self.seminorms[window][name]))


def measure_onset_time(result: RunResult, level: float = 1.0 - 1e-2) -> Optional[float]:
    """First time sup_x|σ| reaches `level` (linear interpolation between records)."""
    sup = result.diagnostics["sup_sigma"]
    hits = np.nonzero(sup >= level)[0]
    if hits.size == 0:
        return None
    k = int(hits[0])
    if k == 0:
        return float(result.times[0])
    t0, t1 = result.times[k - 1], result.times[k]
    s0, s1 = sup[k - 1], sup[k]
    return float(t0 + (level - s0) * (t1 - t0) / (s1 - s0))


def _dissipation_density(pot: RegularizedPotential, sigma: np.ndarray, rho: np.ndarray) -> np.ndarray:
    grad = np.asarray(dgamma(pot, sigma))
    return np.asarray(gamma(pot, sigma)) + np.asarray(fenchel_conjugate(pot, grad)) - rho * grad


def run(
    scenario: Scenario,
    pot: RegularizedPotential,
    dt: float,
    t_end: float,
    probes: Sequence[float] = (),
    snapshots: Sequence[float] = (),
    windows: Sequence[Tuple[float, float]] = (),
    record_increments: bool = False,
) -> RunResult:
    """
    Advance the scenario to t_end and collect probes, snapshots, the energy
    ledger and per-step diagnostics (sup d(σ), sup |σ|, estimate integrals,
    flow-rule and kinematic residuals, windowed H¹ seminorms).
    """
    scenario.validate(t_end)
    check_cfl(scenario, dt)
    grid = scenario.grid
    x, dx = grid.x, grid.dx
    a = scenario.compliance
    profile = pot.profile

    state = initial_state(scenario)
    ledger = EnergyLedger(x, a)
    ledger.start(0.0, state.sigma, state.v)

    names = ("sup_distance", "sup_sigma", "est_l1", "est_l2", "est_uniform",
             "flow_residual", "kinematic_residual")
    diag: Dict[str, List[float]] = {name: [] for name in names}
    probe_series: Dict[float, Dict[str, List[float]]] = {
        float(xp): {"sigma": [], "v": [], "u": []} for xp in probes
    }
    window_series: Dict[Tuple[float, float], Dict[str, List[float]]] = {
        tuple(w): {"sigma": [], "v": []} for w in windows  # type: ignore[misc]
    }
    times: List[float] = []
    residuals: List[float] = []
    snaps: List[State1D] = []
    pending = sorted(float(s) for s in snapshots)
    increments: List[StepIncrement] = []

    def record(s: State1D, flow: float) -> None:
        d = np.asarray(pot.surface.project(s.sigma).distance)
        g = np.asarray(profile.g(d))
        times.append(s.t)
        diag["sup_distance"].append(float(np.max(d)))
        diag["sup_sigma"].append(float(np.max(np.abs(s.sigma))))
        diag["est_l1"].append(float(trapezoid(g * d, x)))
        diag["est_l2"].append(float(trapezoid(g * d * d, x)))
        diag["est_uniform"].append(float(trapezoid(profile.power(d, profile.exponent + 1.0), x)))
        diag["flow_residual"].append(flow)
        diag["kinematic_residual"].append(kinematic_residual(s, dx))
        residuals.append(ledger.residual)
        for xp, series in probe_series.items():
            series["sigma"].append(float(np.interp(xp, x, s.sigma)))
            series["v"].append(float(np.interp(xp, x, s.v)))
            series["u"].append(float(np.interp(xp, x, s.u)))
        for w, series in window_series.items():
            series["sigma"].append(interior_h1_seminorm(s.sigma, x, w))
            series["v"].append(interior_h1_seminorm(s.v, x, w))

    record(state, 0.0)
    while pending and pending[0] <= state.t + 1e-12:
        snaps.append(state.copy())
        pending.pop(0)

    rho_old = scenario.rho(state.t)
    diss_old = _dissipation_density(pot, state.sigma, rho_old)
    n_steps = max(1, int(math.ceil(t_end / dt - 1e-9)))
    LOG.info("dynamic run: nx=%d dt=%.3g steps=%d alpha=%g lambda=%g",
             grid.nx, dt, n_steps, pot.alpha, pot.lam)
    for _ in range(n_steps):
        h = min(dt, t_end - state.t)
        if h <= 1e-14:
            break
        new, inc = _advance(state, scenario, pot, h)
        t_mid = state.t + 0.5 * h

        rho_new = scenario.rho(new.t)
        diss_new = _dissipation_density(pot, new.sigma, rho_new)
        dissipation = 0.5 * h * (trapezoid(diss_old, x) + trapezoid(diss_new, x))

        w_rate = scenario.lift(t_mid, rate=True)
        w_rate_x = scenario.lift_slope(t_mid, rate=True)
        rho_mid = 0.5 * (rho_old + rho_new)
        sigma_mid = 0.5 * (state.sigma + new.sigma)
        work_density = (
            (new.v - state.v) / h * w_rate
            + rho_mid * (a * (new.sigma - state.sigma) / h - w_rate_x)
            + w_rate_x * sigma_mid
        )
        ledger.record(new.t, new.sigma, new.v, float(dissipation), h * float(trapezoid(work_density, x)))

        record(new, flow_rule_increments(pot, new.sigma, inc.dp))
        if record_increments:
            increments.append(inc)
        while pending and pending[0] <= new.t + 1e-12:
            snaps.append(new.copy())
            pending.pop(0)
        state, rho_old, diss_old = new, rho_new, diss_new

    LOG.info("dynamic run done: sup d=%.3e, energy residual=%.3e",
             max(diag["sup_distance"]), ledger.relative_residual)
    return RunResult(
        final=state,
        times=np.array(times),
        ledger=ledger,
        probes={xp: {k: np.array(v) for k, v in s.items()} for xp, s in probe_series.items()},
        snapshots=snaps,
        diagnostics={k: np.array(v) for k, v in diag.items()},
        seminorms={w: {k: np.array(v) for k, v in s.items()} for w, s in window_series.items()},
        increments=increments,
        energy_residuals=np.array(residuals),
    )
