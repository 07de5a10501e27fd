"""
Regularized Norton-Hoff potential γ_{α,λ}(ξ) = φ(d(ξ)).

The radial profile is

    φ(r) = α/(α+1)·(1 + m²)^{e+1} + ½·g(λ)·(r² − λ²)₊,   m = min(r, λ)
    g(r) = (1 + m²)^e,                                   e = 1/(2α) − 1/2

so φ'(r) = g(r)·r and Dγ(ξ) = g(d)·(ξ − Π(ξ)). Powers of (1 + m²) are taken in
log space; anything beyond exp(700) raises PotentialOverflow.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np

from .errors import BracketFailure, NotApplicable, PotentialOverflow
from .geometry import (
    CylindricalSurface,
    IntervalSurface,
    Point,
    YieldSurface,
    estimate_curvature,
)
from .linalg import as_full, dev_full

LOG = logging.getLogger(__name__)

LOG_OVERFLOW = 700.0
BISECTION_TOL = 1e-12
BISECTION_MAX_ITER = 200
MAX_BRACKET = 2.0**60

Scalar = Union[float, np.ndarray]


@dataclass(frozen=True)
class RadialProfile:
    """φ, φ' and g for one (α, λ) pair."""
    alpha: float
    lam: float

    @property
    def exponent(self) -> float:
        return 1.0 / (2.0 * self.alpha) - 0.5

    def power(self, r: Scalar, k: float) -> Scalar:
        m = np.minimum(np.abs(r), self.lam)
        log_term = k * np.log1p(m * m)
        if np.any(log_term > LOG_OVERFLOW):
            raise PotentialOverflow(
                f"(1 + d²∧λ²)^{k:.4g} exceeds exp({LOG_OVERFLOW:.0f}) "
                f"(alpha={self.alpha}, lambda={self.lam})"
            )
        return np.exp(log_term)

    def g(self, r: Scalar) -> Scalar:
        out = self.power(r, self.exponent)
        return float(out) if np.ndim(out) == 0 else out

    def phi(self, r: Scalar) -> Scalar:
        r = np.asarray(r, dtype=float)
        a = self.alpha
        head = a / (a + 1.0) * self.power(r, self.exponent + 1.0)
        tail = 0.5 * self.g(self.lam) * np.maximum(r * r - self.lam**2, 0.0)
        out = head + tail
        return float(out) if np.ndim(out) == 0 else out

    def dphi(self, r: Scalar) -> Scalar:
        out = np.asarray(self.g(r)) * np.asarray(r, dtype=float)
        return float(out) if np.ndim(out) == 0 else out

    def inverse_dphi(self, s: Scalar) -> Scalar:
        """Solve φ'(r) = s for r ≥ 0 by bisection (φ' is strictly increasing)."""
        target = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(target < 0.0) or not np.all(np.isfinite(target)):
            raise ValueError("inverse_dphi needs finite non-negative slopes")
        hi = np.ones_like(target)
        while True:
            short = np.asarray(self.dphi(hi)) < target
            if not np.any(short):
                break
            hi = np.where(short, 2.0 * hi, hi)
            if float(np.max(hi)) > MAX_BRACKET:
                raise BracketFailure(f"slope {float(np.max(target)):.3e} out of representable range")
        lo = np.zeros_like(target)
        for _ in range(BISECTION_MAX_ITER):
            if float(np.max(hi - lo)) <= BISECTION_TOL * (1.0 + float(np.max(hi))):
                break
            mid = 0.5 * (lo + hi)
            below = np.asarray(self.dphi(mid)) < target
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        root = 0.5 * (lo + hi)
        return float(root[0]) if np.ndim(s) == 0 else root

    def conjugate(self, s: Scalar) -> Scalar:
        """φ*(s) = sup_{r ≥ 0} (r·s − φ(r)) for s ≥ 0."""
        r = self.inverse_dphi(s)
        out = np.asarray(r) * np.asarray(s) - np.asarray(self.phi(r))
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class RegularizedPotential:
    """γ_{α,λ} attached to a yield surface."""
    alpha: float
    lam: float
    surface: YieldSurface
    profile: RadialProfile = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.lam > 0.0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        object.__setattr__(self, "profile", RadialProfile(self.alpha, self.lam))

    @property
    def floor(self) -> float:
        """γ on K, the minimum α/(α+1)."""
        return self.alpha / (self.alpha + 1.0)


def gamma(pot: RegularizedPotential, xi: Point) -> Scalar:
    """γ_{α,λ}(ξ); elementwise on arrays for the interval surface."""
    return pot.profile.phi(pot.surface.project(xi).distance)


def dgamma(pot: RegularizedPotential, xi: Point) -> Union[float, np.ndarray]:
    """Dγ(ξ) = g(d(ξ))·(ξ − Π(ξ)); trace-free for matrix surfaces."""
    res = pot.surface.project(xi)
    g = pot.profile.g(res.distance)
    if isinstance(pot.surface, IntervalSurface):
        return g * (np.asarray(xi, dtype=float) - res.point) if isinstance(xi, np.ndarray) \
            else float(g * (float(xi) - res.point))  # type: ignore[arg-type]
    return g * (as_full(xi) - as_full(res.point))


def dgamma_field(pot: RegularizedPotential, sigma: np.ndarray) -> np.ndarray:
    """Dγ at every node of a field: shape (N,) for intervals, (N, n, n) for matrices."""
    if isinstance(pot.surface, IntervalSurface):
        return np.asarray(dgamma(pot, np.asarray(sigma, dtype=float)))
    return np.array([dgamma(pot, s) for s in sigma])


def fenchel_conjugate(pot: RegularizedPotential, eta: Point) -> Scalar:
    """
    γ*(η) = H(η) + sup_{r ≥ 0}(r·|η| − φ(r)).

    Raises:
        BracketFailure: |η| beyond the representable slope range.
        ValueError: η has a hydrostatic part (γ* is +∞ there).
    """
    surface = pot.surface
    if isinstance(surface, IntervalSurface):
        if isinstance(eta, np.ndarray):
            value = surface.support_array(eta) + pot.profile.conjugate(np.abs(eta))
        else:
            e = float(eta)  # type: ignore[arg-type]
            value = surface.support(e) + pot.profile.conjugate(abs(e))
    else:
        full = as_full(eta)
        dev, tr = dev_full(full)
        if abs(tr) > 1e-10 * (1.0 + float(np.linalg.norm(full))):
            raise ValueError(f"conjugate is finite only on trace-free arguments, trace {tr:.3e}")
        value = surface.support(dev) + pot.profile.conjugate(float(np.linalg.norm(dev)))
    if not np.all(np.isfinite(value)):
        raise BracketFailure("conjugate evaluated to a non-finite value")
    return value


# ---------------------------------------------------------------------------
# Inequality audits
# ---------------------------------------------------------------------------

@dataclass
class InequalityReport:
    """Minimal relative slacks of Dγ·ξ ≥ g·d² and Dγ·ξ ≥ r_K·|Dγ|."""
    valid: bool
    samples: int
    slack_sq: float = math.inf
    slack_rk: float = math.inf
    worst_point: Optional[object] = None
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "samples": self.samples,
            "slackSq": self.slack_sq,
            "slackRk": self.slack_rk,
            "error": self.error,
        }


def verify_gradient_inequalities(
    pot: RegularizedPotential,
    points: Optional[List[Point]] = None,
    samples: int = 1000,
    seed: int = 0,
) -> InequalityReport:
    """
    Check Dγ(ξ)·ξ ≥ g(d)·d² and Dγ(ξ)·ξ ≥ r_K·g(d)·d on given or random points.

    Slacks are relative to 1 + |Dγ|·|ξ|; the report fails below −1e-10.
    """
    surface = pot.surface
    if points is None:
        rng = np.random.default_rng(seed)
        points = [surface.random_point(rng) for _ in range(samples)]
    report = InequalityReport(valid=True, samples=len(points))
    for xi in points:
        d = float(surface.project(xi).distance)
        grad = dgamma(pot, xi)
        g = float(pot.profile.g(d))
        xa = np.asarray(xi, dtype=float) if np.isscalar(xi) else as_full(xi)
        pairing = float(np.sum(np.asarray(grad) * xa))
        scale = 1.0 + float(np.linalg.norm(grad)) * float(np.linalg.norm(xa))
        s_sq = (pairing - g * d * d) / scale
        s_rk = (pairing - surface.r_k * g * d) / scale
        if min(s_sq, s_rk) < min(report.slack_sq, report.slack_rk):
            report.worst_point = xi
        report.slack_sq = min(report.slack_sq, s_sq)
        report.slack_rk = min(report.slack_rk, s_rk)
    if min(report.slack_sq, report.slack_rk) < -1e-10:
        report.valid = False
        report.error = (
            f"gradient inequality violated (slacks {report.slack_sq:.3e}, {report.slack_rk:.3e})"
        )
    return report


@dataclass
class ChainRuleReport:
    """Nodewise discrete check of ∂(Dγ(σ))·∂σ against its curvature lower bound."""
    valid: bool
    min_slack: float
    tolerance: float
    nodes: int
    curvature: Optional[float] = None
    mode: str = "deviatoric"

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "minSlack": self.min_slack,
            "tolerance": self.tolerance,
            "nodes": self.nodes,
            "curvature": self.curvature,
            "mode": self.mode,
        }


def chain_rule_curvature_check(
    pot: RegularizedPotential,
    sigma_field: np.ndarray,
    dx: float,
    curvature: Optional[float] = None,
    mode: str = "auto",
) -> ChainRuleReport:
    """
    Discrete form of the chain-rule lower bound

        ∂(Dγ(σ))·∂σ ≥ g(d)·C_K·d/(1 + C_K·d)·|∂σ_D|²

    at interior nodes, with central differences on both sides and an O(dx)
    tolerance. Interval surfaces use the scalar bound ∂(Dγ(σ))·∂σ ≥ g(d)|∂σ|²
    wherever σ is outside K on the whole stencil.

    Raises:
        NotApplicable: deviatoric mode requested for an interval surface.
    """
    sigma = np.asarray(sigma_field, dtype=float)
    if dx <= 0.0:
        raise ValueError(f"dx must be positive, got {dx}")
    if sigma.shape[0] < 3:
        raise ValueError("chain-rule check needs at least three nodes")
    surface = pot.surface
    scalar = isinstance(surface, IntervalSurface)
    if mode == "deviatoric" and scalar:
        raise NotApplicable("deviatoric chain-rule bound has no meaning for an interval surface")

    dg = dgamma_field(pot, sigma)
    d_sigma = (sigma[2:] - sigma[:-2]) / (2.0 * dx)
    d_dg = (dg[2:] - dg[:-2]) / (2.0 * dx)
    if scalar:
        lhs = d_dg * d_sigma
        d = np.asarray(surface.project(sigma).distance)
        outside = (d[:-2] > 0.0) & (d[1:-1] > 0.0) & (d[2:] > 0.0)
        rhs = np.where(outside, np.asarray(pot.profile.g(d[1:-1])) * d_sigma**2, 0.0)
        used_curvature = None
        used_mode = "scalar"
    else:
        assert isinstance(surface, CylindricalSurface)
        used_curvature = curvature if curvature is not None else surface.c_k
        if used_curvature is None:
            used_curvature = estimate_curvature(surface).value
        c = float(used_curvature)
        lhs = np.einsum("kij,kij->k", d_dg, d_sigma)
        d = np.array([float(surface.project(s).distance) for s in sigma[1:-1]])
        g = np.asarray(pot.profile.g(d))
        dev_sq = np.array([float(np.sum(dev_full(v)[0] ** 2)) for v in d_sigma])
        rhs = g * c * d / (1.0 + c * d) * dev_sq
        used_mode = "deviatoric"

    slack = lhs - rhs
    tolerance = 4.0 * dx * (1.0 + float(np.max(np.abs(lhs))))
    min_slack = float(np.min(slack))
    LOG.debug("chain-rule check: min slack %.3e, tolerance %.3e", min_slack, tolerance)
    return ChainRuleReport(
        valid=min_slack >= -tolerance,
        min_slack=min_slack,
        tolerance=tolerance,
        nodes=int(slack.size),
        curvature=used_curvature,
        mode=used_mode,
    )
