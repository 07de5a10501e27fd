"""
Closed-form one-dimensional solutions of the perfectly plastic limit
(K = [−1, 1], unit compliance, w(0) = 0), used as oracles.

Stationary, w(L) = a_bc:
    elastic   (|a_bc| ≤ tanh L):  u = a_bc·sinh x / sinh L,  σ = a_bc·cosh x / sinh L
    plastic   (|a_bc| > tanh L):  u = 2c·sinh x,  σ = 2c·cosh x,  c = sign(a_bc) / (2 cosh L),
                                  plus a plastic atom a_bc − 2c·sinh L at x = L.

Evolutionary, w(t, L) = a·eᵗ with 0 < a < tanh L < a·e^T: elastic until
t₀ = ln(tanh L / a); afterwards the region B = {x > γ(t)},
γ(t) = arccosh(sinh L / (a·eᵗ)), is plastic with σ = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]

REGION_ELASTIC = "elastic"
REGION_A = "A"
REGION_B = "B"
REGION_GAMMA = "Gamma"


@dataclass(frozen=True)
class StationaryExact:
    length: float = 1.0
    a_bc: float = 0.5

    def __post_init__(self) -> None:
        if not self.length > 0.0:
            raise ValueError(f"plastiflow: length must be positive, got {self.length}")

    @property
    def elastic(self) -> bool:
        return abs(self.a_bc) <= math.tanh(self.length)

    @property
    def regime(self) -> str:
        return "elastic" if self.elastic else "plastic_boundary"

    @property
    def coefficient(self) -> float:
        """Amplitude c of u = 2c·sinh x (a_bc / (2 sinh L) when elastic)."""
        if self.elastic:
            return self.a_bc / (2.0 * math.sinh(self.length))
        return math.copysign(1.0, self.a_bc) / (2.0 * math.cosh(self.length))

    @property
    def atom(self) -> float:
        """Plastic point mass at x = L."""
        if self.elastic:
            return 0.0
        return self.a_bc - 2.0 * self.coefficient * math.sinh(self.length)


@dataclass(frozen=True)
class EvolutionaryExact:
    length: float = 1.0
    a: float = 0.5
    t_end: float = 2.0

    def __post_init__(self) -> None:
        th = math.tanh(self.length)
        if not (0.0 < self.a < th < self.a * math.exp(self.t_end)):
            raise ValueError(
                f"plastiflow: evolutionary example needs 0 < a < tanh L < a e^T "
                f"(a={self.a}, tanh L={th:.6g}, a e^T={self.a * math.exp(self.t_end):.6g})"
            )

    @property
    def t0(self) -> float:
        return math.log(math.tanh(self.length) / self.a)

    @property
    def t_exit(self) -> float:
        """Time at which γ reaches 0; afterwards the whole interval is plastic."""
        return math.log(math.sinh(self.length) / self.a)

    def interface(self, t: ArrayLike) -> ArrayLike:
        """γ(t) for t ≥ t₀ (equal to L at t₀, clipped at 0 after t_exit)."""
        arg = np.maximum(math.sinh(self.length) / (self.a * np.exp(t)), 1.0)
        out = np.arccosh(arg)
        return float(out) if np.ndim(out) == 0 else out


@dataclass
class ExactFields:
    u: np.ndarray
    velocity: np.ndarray
    sigma: np.ndarray
    p_rate: np.ndarray
    p_density: np.ndarray
    region: np.ndarray
    atom: float = 0.0


def stationary_eval(se: StationaryExact, x: ArrayLike) -> ExactFields:
    """u, σ and the atom at L; p has no absolutely continuous part."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs < -1e-12) or np.any(xs > se.length + 1e-12):
        raise ValueError("plastiflow: x must lie in [0, L]")
    c = se.coefficient
    u = 2.0 * c * np.sinh(xs)
    sigma = 2.0 * c * np.cosh(xs)
    zero = np.zeros_like(xs)
    region = np.full(xs.shape, REGION_ELASTIC if se.elastic else REGION_A, dtype=object)
    return ExactFields(u=u, velocity=zero, sigma=sigma, p_rate=zero, p_density=zero.copy(),
                       region=region, atom=se.atom)


def _branch_a(ee: EvolutionaryExact, t: np.ndarray, x: np.ndarray):
    amp = ee.a * np.exp(t) / math.sinh(ee.length)
    u = amp * np.sinh(x)
    return u, u.copy(), amp * np.cosh(x)


def _branch_b(ee: EvolutionaryExact, t: np.ndarray, x: np.ndarray):
    log_term = np.log(math.sinh(ee.length) / (ee.a * np.cosh(x)))
    th = np.tanh(x)
    u = th * (t + 1.0 - log_term)
    p_density = (1.0 - th * th) * (t - log_term)
    return u, th.copy(), np.ones_like(x), p_density


def evolutionary_eval(ee: EvolutionaryExact, t: float, x: ArrayLike) -> ExactFields:
    """
    Fields at time t; on Γ itself the B-branch is returned with ṗ = 0.

    The atom is the boundary jump w(t, L) − u(t, L).
    """
    if t < -1e-12 or t > ee.t_end + 1e-12:
        raise ValueError(f"plastiflow: t={t} outside [0, T]")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs < -1e-12) or np.any(xs > ee.length + 1e-12):
        raise ValueError("plastiflow: x must lie in [0, L]")
    tt = np.full_like(xs, t)
    u, vel, sigma = _branch_a(ee, tt, xs)
    zero = np.zeros_like(xs)
    if t <= ee.t0:
        region = np.full(xs.shape, REGION_ELASTIC, dtype=object)
        return ExactFields(u=u, velocity=vel, sigma=sigma, p_rate=zero, p_density=zero.copy(),
                           region=region, atom=0.0)

    gam = float(ee.interface(t))
    on_gamma = np.abs(xs - gam) <= 1e-12
    in_b = (xs > gam) | on_gamma
    ub, velb, sigmab, pb = _branch_b(ee, tt, xs)
    region = np.where(on_gamma, REGION_GAMMA, np.where(in_b, REGION_B, REGION_A)).astype(object)
    th = np.tanh(xs)
    return ExactFields(
        u=np.where(in_b, ub, u),
        velocity=np.where(in_b, velb, vel),
        sigma=np.where(in_b, sigmab, sigma),
        p_rate=np.where(in_b & ~on_gamma, 1.0 - th * th, 0.0),
        p_density=np.where(in_b, pb, 0.0),
        region=region,
        atom=boundary_jump(ee, t),
    )


def boundary_jump(ee: EvolutionaryExact, t: float) -> float:
    """w(t, L) − u(t, L): zero up to t₀, strictly increasing afterwards."""
    if t <= ee.t0:
        return 0.0
    th = math.tanh(ee.length)
    return ee.a * math.exp(t) - th * (t + 1.0 - math.log(th / ee.a))


# ---------------------------------------------------------------------------
# Residual audit
# ---------------------------------------------------------------------------

@dataclass
class ExactReport:
    valid: bool
    checks: int = 0
    max_pde_residual: float = 0.0
    max_interface_jump: float = 0.0
    violations: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "checks": self.checks,
            "maxPdeResidual": self.max_pde_residual,
            "maxInterfaceJump": self.max_interface_jump,
            "violations": list(self.violations),
        }


def _verify_stationary(se: StationaryExact, tolerance: float, step: float, samples: int) -> ExactReport:
    report = ExactReport(valid=True)
    xs = np.linspace(step, se.length - step, samples)
    f = stationary_eval(se, xs)
    fp = stationary_eval(se, xs + step)
    fm = stationary_eval(se, xs - step)
    sigma_x = (fp.sigma - fm.sigma) / (2.0 * step)
    u_x = (fp.u - fm.u) / (2.0 * step)
    # u − σ' = 0 and u' = σ + p with p = 0 inside
    report.max_pde_residual = float(max(np.max(np.abs(f.u - sigma_x)), np.max(np.abs(u_x - f.sigma))))
    report.checks += 2 * samples
    if report.max_pde_residual > tolerance:
        report.violations.append(f"stationary equations residual {report.max_pde_residual:.3e}")
    if float(np.max(np.abs(f.sigma))) > 1.0 + 1e-12:
        report.violations.append("stress constraint |sigma| <= 1 violated")
    end = stationary_eval(se, se.length)
    u_l, sigma_l = float(end.u[0]), float(end.sigma[0])
    if abs(float(stationary_eval(se, 0.0).u[0])) > 1e-14:
        report.violations.append("u(0) != w(0)")
    if se.elastic:
        if abs(u_l - se.a_bc) > tolerance:
            report.violations.append("elastic regime misses the Dirichlet datum at L")
    elif sigma_l * (se.a_bc - u_l) < -1e-14 or abs(abs(sigma_l) - 1.0) > 1e-12:
        report.violations.append("boundary flow rule at L violated")
    report.checks += 3
    report.valid = not report.violations
    return report


def _verify_evolutionary(ee: EvolutionaryExact, tolerance: float, step: float, samples: int) -> ExactReport:
    report = ExactReport(valid=True)
    h = max(step, 1e-3)
    times = np.linspace(h, ee.t_end - h, samples)
    xs = np.linspace(h, ee.length - h, samples)
    sigma_max = 0.0
    for t in times:
        # second differences straddling Γ or t₀ are not meaningful
        if abs(t - ee.t0) <= 3.0 * h or t + h > ee.t_end:
            continue
        keep = np.ones_like(xs, dtype=bool)
        for s in (t - h, t, t + h):
            if s > ee.t0:
                keep &= np.abs(xs - float(ee.interface(s))) > 3.0 * h
        x_ok = xs[keep]
        if x_ok.size == 0:
            continue
        mid = evolutionary_eval(ee, t, x_ok)
        u_tt = (evolutionary_eval(ee, t + h, x_ok).u - 2.0 * mid.u + evolutionary_eval(ee, t - h, x_ok).u) / h**2
        sigma_x = (evolutionary_eval(ee, t, x_ok + h).sigma - evolutionary_eval(ee, t, x_ok - h).sigma) / (2.0 * h)
        # x ± h may straddle Γ only where keep already excluded it
        res = float(np.max(np.abs(u_tt - sigma_x)))
        report.max_pde_residual = max(report.max_pde_residual, res)
        sigma_max = max(sigma_max, float(np.max(np.abs(mid.sigma))))
        flow = mid.sigma * mid.p_rate - np.abs(mid.p_rate)
        if float(np.max(np.abs(flow))) > 1e-12 or float(np.min(mid.p_rate)) < 0.0:
            report.violations.append(f"interior flow rule violated at t={t:.4g}")
        report.checks += int(x_ok.size)
    if report.max_pde_residual > tolerance:
        report.violations.append(f"equation of motion residual {report.max_pde_residual:.3e}")
    if sigma_max > 1.0 + 1e-12:
        report.violations.append("stress constraint |sigma| <= 1 violated")

    # continuity of u, u̇ and σ along Γ, and of the elastic fields at t₀
    for t in np.linspace(ee.t0, min(ee.t_exit, ee.t_end), samples):
        gam = np.array([float(ee.interface(t))])
        tt = np.array([t])
        ua, va, sa = _branch_a(ee, tt, gam)
        ub, vb, sb, _ = _branch_b(ee, tt, gam)
        jump = float(max(abs(ua[0] - ub[0]), abs(va[0] - vb[0]), abs(sa[0] - sb[0])))
        report.max_interface_jump = max(report.max_interface_jump, jump)
    if report.max_interface_jump > 1e-10:
        report.violations.append(f"discontinuity across the interface {report.max_interface_jump:.3e}")

    grid_t = np.linspace(0.0, ee.t_end, 1000)
    jumps = np.array([boundary_jump(ee, float(t)) for t in grid_t])
    if np.any(jumps[grid_t <= ee.t0] != 0.0) or np.any(np.diff(jumps[grid_t > ee.t0]) <= 0.0):
        report.violations.append("boundary jump is not zero then strictly increasing")
    report.checks += samples + 1000
    report.valid = not report.violations
    return report


def verify_exact_solution(
    solution: Union[StationaryExact, EvolutionaryExact],
    tolerance: Optional[float] = None,
    step: float = 1e-4,
    samples: int = 200,
) -> ExactReport:
    """
    Dense-sampling audit of a closed form: equations by finite differences
    away from the interface, stress constraint, flow rule, continuity across
    Γ and t₀, and boundary optimality at x = L.

    Second time differences use a step of at least 1e-3, so the default
    tolerance is 1e-8 for stationary and 1e-6 for evolutionary solutions.
    """
    if isinstance(solution, StationaryExact):
        return _verify_stationary(solution, 1e-8 if tolerance is None else tolerance, step, samples)
    return _verify_evolutionary(solution, 1e-6 if tolerance is None else tolerance, step, samples)
