"""
Yield-set geometry: distance, projection, support function, projection
differential and curvature for compact convex yield sets.

Matrix surfaces live in the trace-free symmetric matrices and act on the
full space through their cylinder K + R·Id: the deviatoric part of the input
is projected, the hydrostatic part is kept. The interval surface acts
directly on scalars (and elementwise on numpy arrays, which is how the 1D
solvers use it).
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import brentq, minimize_scalar

from .errors import DegenerateInput, NonConvergence, NotSmooth
from .linalg import (
    SymMatrix,
    as_full,
    dev_full,
    deviatoric_basis,
    eigh_sym,
    from_dev_coords,
    to_dev_coords,
)

LOG = logging.getLogger(__name__)

Point = Union[float, np.ndarray, SymMatrix]

PROJECTION_TOL = 1e-10
MAX_ITER = 200


@dataclass
class ProjectionResult:
    """Projection of a point onto K (or onto the cylinder 𝐊)."""
    point: Point
    distance: Union[float, np.ndarray]
    inside: Union[bool, np.ndarray]


@dataclass
class CurvatureEstimate:
    """Sampled lower bound of the second fundamental form of ∂K."""
    value: Optional[float]
    samples: int
    applicable: bool = True
    note: str = ""


class YieldSurface(ABC):
    """Common interface of every admissible set."""

    kind: str = ""

    @property
    @abstractmethod
    def r_k(self) -> float:
        """Inner-ball radius."""

    @property
    @abstractmethod
    def R_k(self) -> float:
        """Outer-ball radius."""

    @property
    def curvature_bound(self) -> Optional[float]:
        """Closed-form C_K when one is known."""
        return None

    @property
    def c_k(self) -> Optional[float]:
        """Verified curvature constant, or None while unverified."""
        value = getattr(self, "curvature", None)
        return value if value is not None else self.curvature_bound

    @abstractmethod
    def project(self, x: Point) -> ProjectionResult:
        ...

    @abstractmethod
    def support(self, q: Point) -> float:
        ...

    @abstractmethod
    def random_point(self, rng: np.random.Generator, spread: float = 3.0) -> Point:
        """Random point of the ambient space, typically outside K."""

    @abstractmethod
    def random_inside(self, rng: np.random.Generator) -> Point:
        """Random point of K."""


# ---------------------------------------------------------------------------
# Interval K = [lower, upper] ⊂ ℝ
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntervalSurface(YieldSurface):
    """Interval [lower, upper] containing 0 in its interior."""
    lower: float = -1.0
    upper: float = 1.0

    kind = "interval"

    def __post_init__(self) -> None:
        if not (self.lower < 0.0 < self.upper):
            raise ValueError(
                f"interval must contain 0 in its interior, got [{self.lower}, {self.upper}]"
            )

    @property
    def r_k(self) -> float:
        return min(-self.lower, self.upper)

    @property
    def R_k(self) -> float:
        return max(-self.lower, self.upper)

    def project(self, x: Point) -> ProjectionResult:
        if isinstance(x, np.ndarray):
            point = np.clip(x, self.lower, self.upper)
            dist = np.abs(x - point)
            return ProjectionResult(point=point, distance=dist, inside=dist == 0.0)
        xf = float(x)  # type: ignore[arg-type]
        point = min(max(xf, self.lower), self.upper)
        dist = abs(xf - point)
        return ProjectionResult(point=point, distance=dist, inside=dist == 0.0)

    def support(self, q: Point) -> float:
        qf = float(q)  # type: ignore[arg-type]
        return self.upper * qf if qf >= 0.0 else self.lower * qf

    def support_array(self, q: np.ndarray) -> np.ndarray:
        return np.where(q >= 0.0, self.upper * q, self.lower * q)

    def random_point(self, rng: np.random.Generator, spread: float = 3.0) -> float:
        return float(rng.uniform(-spread * self.R_k, spread * self.R_k))

    def random_inside(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.lower, self.upper))


# ---------------------------------------------------------------------------
# Cylindrical matrix surfaces K ⊂ 𝕄ⁿˣⁿ_D, 𝐊 = K + ℝ·Id
# ---------------------------------------------------------------------------

class CylindricalSurface(YieldSurface):
    """Base for compact convex K in deviatoric matrix space."""

    n: int

    @abstractmethod
    def _project_dev(self, x_dev: np.ndarray) -> np.ndarray:
        """Projection of a trace-free matrix onto K."""

    @abstractmethod
    def boundary_radius(self, direction: np.ndarray) -> float:
        """t > 0 with t·direction/|direction| on ∂K."""

    @abstractmethod
    def defining_value(self, y: np.ndarray) -> float:
        """Defining function F with K = {F ≤ level}."""

    @abstractmethod
    def defining_gradient(self, y: np.ndarray) -> np.ndarray:
        """DF(y) as a trace-free matrix."""

    @property
    def basis(self) -> np.ndarray:
        return deviatoric_basis(self.n)

    def _check_shape(self, x: np.ndarray) -> None:
        if x.shape != (self.n, self.n):
            raise ValueError(
                f"{self.kind} surface lives in {self.n}x{self.n} matrices, got shape {x.shape}"
            )

    def project(self, x: Point) -> ProjectionResult:
        full = as_full(x)
        self._check_shape(full)
        x_dev, tr = dev_full(full)
        y = self._project_dev(x_dev)
        dist = float(np.linalg.norm(x_dev - y))
        point = y + (tr / self.n) * np.eye(self.n)
        if dist == 0.0:
            point = full.copy()
        if isinstance(x, SymMatrix):
            point = SymMatrix.from_full(point)
        return ProjectionResult(point=point, distance=dist, inside=dist == 0.0)

    def hessian_form(self, y: Point, xi: Point, step: float = 1e-6) -> float:
        """D²F(y)ξ·ξ by central differences of the defining gradient."""
        yf, xf = dev_full(as_full(y))[0], dev_full(as_full(xi))[0]
        h = step * (1.0 + float(np.linalg.norm(yf)))
        plus = self.defining_gradient(yf + h * xf)
        minus = self.defining_gradient(yf - h * xf)
        return float(np.sum((plus - minus) * xf) / (2.0 * h))

    def defining_hessian_coords(self, y: np.ndarray) -> np.ndarray:
        """Hessian of F in orthonormal deviatoric coordinates (finite differences)."""
        basis = self.basis
        m = basis.shape[0]
        h = 1e-6 * (1.0 + float(np.linalg.norm(y)))
        hess = np.zeros((m, m))
        for k in range(m):
            plus = to_dev_coords(self.defining_gradient(y + h * basis[k]), basis)
            minus = to_dev_coords(self.defining_gradient(y - h * basis[k]), basis)
            hess[:, k] = (plus - minus) / (2.0 * h)
        return 0.5 * (hess + hess.T)

    def special_directions(self) -> List[np.ndarray]:
        """Deviatoric directions always included when sampling ∂K."""
        return []

    def curvature_quotients(self, samples: int, rng: np.random.Generator) -> np.ndarray:
        """Min tangential Hessian quotient D²F v·v / |DF| at sampled boundary points."""
        basis = self.basis
        m = basis.shape[0]
        dirs = [from_dev_coords(rng.standard_normal(m), basis) for _ in range(samples)]
        dirs.extend(self.special_directions())
        out = np.empty(len(dirs))
        for i, d in enumerate(dirs):
            y = self.boundary_radius(d) * d / np.linalg.norm(d)
            grad = to_dev_coords(self.defining_gradient(y), basis)
            hess = self.defining_hessian_coords(y)
            tangent = null_space(grad[None, :])
            reduced = tangent.T @ hess @ tangent
            out[i] = float(np.linalg.eigvalsh(reduced)[0]) / float(np.linalg.norm(grad))
        return out

    def random_point(self, rng: np.random.Generator, spread: float = 3.0) -> np.ndarray:
        a = rng.standard_normal((self.n, self.n))
        a = 0.5 * (a + a.T)
        return spread * self.R_k * a / max(float(np.linalg.norm(a)), 1e-12)

    def random_inside(self, rng: np.random.Generator) -> np.ndarray:
        d = from_dev_coords(rng.standard_normal(self.basis.shape[0]), self.basis)
        t = self.boundary_radius(d) * rng.uniform(0.0, 1.0)
        return t * d / np.linalg.norm(d) + rng.standard_normal() * np.eye(self.n)


@dataclass(frozen=True)
class VonMisesBall(CylindricalSurface):
    """Ball {|σ_D| ≤ radius} of the deviatoric space."""
    n: int = 3
    radius: float = 1.0
    curvature: Optional[float] = None

    kind = "von_mises"

    def __post_init__(self) -> None:
        if self.n not in (2, 3):
            raise ValueError(f"von Mises ball needs n in (2, 3), got {self.n}")
        if self.radius <= 0.0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    @property
    def r_k(self) -> float:
        return self.radius

    @property
    def R_k(self) -> float:
        return self.radius

    @property
    def curvature_bound(self) -> float:
        return 1.0 / self.radius

    def _project_dev(self, x_dev: np.ndarray) -> np.ndarray:
        r = float(np.linalg.norm(x_dev))
        if r <= self.radius:
            return x_dev
        return x_dev * (self.radius / r)

    def boundary_radius(self, direction: np.ndarray) -> float:
        return self.radius

    def defining_value(self, y: np.ndarray) -> float:
        return float(np.sum(y * y))

    def defining_gradient(self, y: np.ndarray) -> np.ndarray:
        return 2.0 * y

    def support(self, q: Point) -> float:
        return self.radius * float(np.linalg.norm(dev_full(as_full(q))[0]))


@dataclass(frozen=True)
class HillEllipsoid(CylindricalSurface):
    """
    Hill ellipsoid {c·Bc ≤ 1}, with c the orthonormal deviatoric coordinates
    of σ_D (diagonal directions first, then off-diagonal pairs).

    b_matrix is the m×m symmetric positive-definite matrix of B,
    m = n(n+1)/2 - 1.
    """
    n: int = 3
    b_matrix: Tuple[Tuple[float, ...], ...] = ()
    curvature: Optional[float] = None
    _eigvals: np.ndarray = field(init=False, repr=False, compare=False)
    _eigvecs: np.ndarray = field(init=False, repr=False, compare=False)

    kind = "hill"

    def __post_init__(self) -> None:
        if self.n not in (2, 3):
            raise ValueError(f"Hill ellipsoid needs n in (2, 3), got {self.n}")
        m = self.n * (self.n + 1) // 2 - 1
        b = np.asarray(self.b_matrix, dtype=float)
        if b.shape != (m, m):
            raise ValueError(f"Hill B-matrix must be {m}x{m} for n={self.n}, got {b.shape}")
        if not np.allclose(b, b.T, atol=1e-12):
            raise ValueError("Hill B-matrix must be symmetric")
        vals, vecs = np.linalg.eigh(b)
        if vals[0] <= 0.0:
            raise ValueError(f"Hill B-matrix must be positive definite, min eigenvalue {vals[0]}")
        object.__setattr__(self, "_eigvals", vals)
        object.__setattr__(self, "_eigvecs", vecs)

    @classmethod
    def from_array(cls, n: int, b: np.ndarray, curvature: Optional[float] = None) -> "HillEllipsoid":
        rows = tuple(tuple(float(v) for v in row) for row in np.asarray(b, dtype=float))
        return cls(n=n, b_matrix=rows, curvature=curvature)

    @property
    def b(self) -> np.ndarray:
        return np.asarray(self.b_matrix, dtype=float)

    @property
    def r_k(self) -> float:
        return 1.0 / math.sqrt(float(self._eigvals[-1]))

    @property
    def R_k(self) -> float:
        return 1.0 / math.sqrt(float(self._eigvals[0]))

    @property
    def curvature_bound(self) -> float:
        # a_min / a_max² with semi-axes a_i = 1/sqrt(λ_i)
        return float(self._eigvals[0]) / math.sqrt(float(self._eigvals[-1]))

    def _project_dev(self, x_dev: np.ndarray) -> np.ndarray:
        basis = self.basis
        c = to_dev_coords(x_dev, basis)
        if float(c @ self.b @ c) <= 1.0:
            return x_dev
        lam, q = self._eigvals, self._eigvecs
        ct = q.T @ c

        def excess(mu: float) -> float:
            return float(np.sum(lam * ct**2 / (1.0 + mu * lam) ** 2)) - 1.0

        mu_hi = math.sqrt(float(np.sum(ct**2 / lam))) + 1e-300
        try:
            mu = brentq(excess, 0.0, mu_hi, xtol=1e-15, rtol=1e-15, maxiter=MAX_ITER)
        except (RuntimeError, ValueError) as exc:
            raise NonConvergence(f"ellipsoid multiplier search failed: {exc}") from exc
        y = q @ (ct / (1.0 + mu * lam))
        return from_dev_coords(y, basis)

    def boundary_radius(self, direction: np.ndarray) -> float:
        c = to_dev_coords(direction, self.basis)
        c = c / np.linalg.norm(c)
        return 1.0 / math.sqrt(float(c @ self.b @ c))

    def defining_value(self, y: np.ndarray) -> float:
        c = to_dev_coords(y, self.basis)
        return float(c @ self.b @ c)

    def defining_gradient(self, y: np.ndarray) -> np.ndarray:
        c = to_dev_coords(y, self.basis)
        return from_dev_coords(2.0 * self.b @ c, self.basis)

    def defining_hessian_coords(self, y: np.ndarray) -> np.ndarray:
        return 2.0 * self.b

    def special_directions(self) -> List[np.ndarray]:
        axes = [from_dev_coords(self._eigvecs[:, k], self.basis) for k in range(self._eigvecs.shape[1])]
        return axes + [-a for a in axes]

    def support(self, q: Point) -> float:
        c = to_dev_coords(dev_full(as_full(q))[0], self.basis)
        return math.sqrt(float(c @ np.linalg.solve(self.b, c)))


# ---------------------------------------------------------------------------
# Hosford: F(σ) = Σ_{i<j} |σ_i - σ_j|^p over eigenvalues, K = {F ≤ scale^p}
# ---------------------------------------------------------------------------

def hosford_f(lam: np.ndarray, p: float) -> float:
    total = 0.0
    for i in range(lam.size):
        for j in range(i + 1, lam.size):
            total += abs(lam[i] - lam[j]) ** p
    return total


def hosford_grad(lam: np.ndarray, p: float) -> np.ndarray:
    diff = lam[:, None] - lam[None, :]
    return np.sum(p * np.abs(diff) ** (p - 1.0) * np.sign(diff), axis=1)


def hosford_hess(lam: np.ndarray, p: float) -> np.ndarray:
    diff = np.abs(lam[:, None] - lam[None, :])
    off = p * (p - 1.0) * diff ** (p - 2.0)
    np.fill_diagonal(off, 0.0)
    return np.diag(np.sum(off, axis=1)) - off


def _plane_basis(n: int) -> np.ndarray:
    """Orthonormal basis (rows) of the trace-free eigenvalue plane."""
    if n == 2:
        return np.array([[1.0, -1.0]]) / math.sqrt(2.0)
    return np.array([[1.0, -1.0, 0.0], [1.0, 1.0, -2.0]]) / np.array([[math.sqrt(2.0)], [math.sqrt(6.0)]])


@dataclass(frozen=True)
class HosfordSurface(CylindricalSurface):
    """Hosford criterion with exponent p ≥ 2 and calibration scale."""
    n: int = 3
    p: float = 4.0
    scale: float = 1.0
    curvature: Optional[float] = None
    _radii: Tuple[float, float] = field(init=False, repr=False, compare=False)

    kind = "hosford"

    def __post_init__(self) -> None:
        if self.n not in (2, 3):
            raise ValueError(f"Hosford surface needs n in (2, 3), got {self.n}")
        if self.p < 2.0:
            raise ValueError(f"Hosford exponent must satisfy p >= 2, got {self.p}")
        if self.scale <= 0.0:
            raise ValueError(f"Hosford scale must be positive, got {self.scale}")
        object.__setattr__(self, "_radii", self._compute_radii())

    # -- eigenvalue-plane helpers ------------------------------------------

    def _plane_point(self, theta: float) -> np.ndarray:
        pb = _plane_basis(self.n)
        if self.n == 2:
            return pb[0] * (1.0 if math.cos(theta) >= 0.0 else -1.0)
        return math.cos(theta) * pb[0] + math.sin(theta) * pb[1]

    def _radial(self, unit_eig: np.ndarray) -> float:
        return self.scale / hosford_f(unit_eig, self.p) ** (1.0 / self.p)

    def _compute_radii(self) -> Tuple[float, float]:
        if self.n == 2:
            r = self._radial(_plane_basis(2)[0])
            return r, r

        def radial(theta: float) -> float:
            return self._radial(self._plane_point(theta))

        grid = np.linspace(0.0, 2.0 * math.pi, 721)
        values = np.array([radial(t) for t in grid])
        step = grid[1] - grid[0]
        extremes = []
        for sign in (1.0, -1.0):
            k = int(np.argmin(sign * values))
            res = minimize_scalar(
                lambda t: sign * radial(t),
                bounds=(grid[k] - step, grid[k] + step),
                method="bounded",
                options={"xatol": 1e-12},
            )
            # signed objective: the smaller one is the better extremum
            extremes.append(sign * min(float(res.fun), sign * float(values[k])))
        return float(extremes[0]), float(extremes[1])

    @property
    def r_k(self) -> float:
        return self._radii[0]

    @property
    def R_k(self) -> float:
        return self._radii[1]

    # -- defining function -------------------------------------------------

    def defining_value(self, y: np.ndarray) -> float:
        return hosford_f(eigh_sym(y)[0], self.p)

    def defining_gradient(self, y: np.ndarray) -> np.ndarray:
        vals, vecs = eigh_sym(y)
        return vecs @ np.diag(hosford_grad(vals, self.p)) @ vecs.T

    def boundary_radius(self, direction: np.ndarray) -> float:
        vals = eigh_sym(direction)[0]
        return self._radial(vals / np.linalg.norm(vals))

    # -- projection ----------------------------------------------------------

    def _prox(self, target: np.ndarray, mu: float) -> np.ndarray:
        """argmin_y ½|y - target|² + μ f(y), by damped Newton."""
        p = self.p
        y = target.copy()
        tol = 1e-13 * (1.0 + float(np.linalg.norm(target)))
        near = 1e-6 * (1.0 + float(np.linalg.norm(target)))

        def objective(z: np.ndarray) -> float:
            return 0.5 * float(np.sum((z - target) ** 2)) + mu * hosford_f(z, p)

        for _ in range(MAX_ITER):
            grad = y - target + mu * hosford_grad(y, p)
            gnorm = float(np.linalg.norm(grad))
            if gnorm <= tol:
                return y
            jac = np.eye(y.size) + mu * hosford_hess(y, p)
            step = np.linalg.solve(jac, -grad)
            # objective differences drown in rounding near the minimizer
            if gnorm <= near:
                y = y + step
                continue
            f0 = objective(y)
            slope = float(grad @ step)
            t = 1.0
            while objective(y + t * step) > f0 + 1e-4 * t * slope and t > 1e-12:
                t *= 0.5
            y = y + t * step
        raise NonConvergence(f"Hosford prox Newton did not converge for mu={mu:.3e}")

    def _project_eigs(self, lam: np.ndarray) -> np.ndarray:
        level = 1.0
        target = lam / self.scale
        if hosford_f(target, self.p) <= level:
            return lam

        def excess(mu: float) -> float:
            return hosford_f(self._prox(target, mu), self.p) - level

        mu_hi = 1.0
        for _ in range(MAX_ITER):
            if excess(mu_hi) < 0.0:
                break
            mu_hi *= 2.0
        else:
            raise NonConvergence("Hosford multiplier bracket could not be established")
        try:
            mu = brentq(excess, 0.0, mu_hi, xtol=1e-16, rtol=1e-15, maxiter=MAX_ITER)
        except RuntimeError as exc:
            raise NonConvergence(f"Hosford multiplier search failed: {exc}") from exc
        y = self._prox(target, mu)
        # land exactly on the level set along the ray through y
        y *= (level / hosford_f(y, self.p)) ** (1.0 / self.p)
        return self.scale * y

    def _project_dev(self, x_dev: np.ndarray) -> np.ndarray:
        if hosford_f(eigh_sym(x_dev)[0] / self.scale, self.p) <= 1.0:
            return x_dev
        vals, vecs = eigh_sym(x_dev)
        y = self._project_eigs(vals)
        return vecs @ np.diag(y) @ vecs.T

    # -- support function ----------------------------------------------------

    def support(self, q: Point) -> float:
        q_dev = dev_full(as_full(q))[0]
        mu_q = eigh_sym(q_dev)[0]
        if self.n == 2:
            e = _plane_basis(2)[0]
            return self._radial(e) * abs(float(mu_q @ e))

        def value(theta: float) -> float:
            u = self._plane_point(theta)
            return self._radial(u) * float(u @ mu_q)

        grid = np.linspace(0.0, 2.0 * math.pi, 721)
        values = np.array([value(t) for t in grid])
        step = grid[1] - grid[0]
        starts = np.argsort(-values)[:3]
        refined = []
        for k in starts:
            res = minimize_scalar(
                lambda t: -value(t),
                bounds=(grid[k] - step, grid[k] + step),
                method="bounded",
                options={"xatol": 1e-12, "maxiter": MAX_ITER},
            )
            if not res.success:
                raise NonConvergence(f"Hosford support ascent failed: {res.message}")
            refined.append(max(-float(res.fun), float(values[k])))
        best = max(refined)
        if best - min(refined) > 1e-6 * (1.0 + abs(best)):
            LOG.warning("Hosford support multistart disagreement: %s", refined)
        return best

    # -- curvature in the spectral frame -------------------------------------

    def curvature_quotients(self, samples: int, rng: np.random.Generator) -> np.ndarray:
        """
        Tangential Hessian quotients at diagonal boundary points.

        ∂K is invariant under orthogonal conjugation, so diagonal points cover
        every boundary point. At diag(y) the Hessian of F splits into the
        eigenvalue-plane block and one eigenvalue (f_i - f_j)/(y_i - y_j) per
        off-diagonal direction.
        """
        p = self.p
        thetas = list(rng.uniform(0.0, 2.0 * math.pi, size=samples))
        thetas.extend(k * math.pi / 6.0 for k in range(12))
        ones = np.ones(self.n) / math.sqrt(self.n)
        out = np.empty(len(thetas))
        for idx, theta in enumerate(thetas):
            u = self._plane_point(theta)
            y = self._radial(u) * u / self.scale
            g = hosford_grad(y, p)
            h = hosford_hess(y, p)
            gnorm = float(np.linalg.norm(g))
            quotients = []
            if self.n == 3:
                t = np.cross(ones, g / gnorm)
                t /= np.linalg.norm(t)
                quotients.append(float(t @ h @ t))
            for i in range(self.n):
                for j in range(i + 1, self.n):
                    gap = y[i] - y[j]
                    if abs(gap) > 1e-8:
                        quotients.append(float((g[i] - g[j]) / gap))
                    else:
                        quotients.append(float(h[i, i] - h[i, j]))
            # curvature of {F ≤ scale^p} = curvature of {F ≤ 1} / scale
            out[idx] = min(quotients) / gnorm / self.scale
        return out

    def random_inside(self, rng: np.random.Generator) -> np.ndarray:
        d = from_dev_coords(rng.standard_normal(self.basis.shape[0]), self.basis)
        d /= np.linalg.norm(d)
        t = self.boundary_radius(d) * rng.uniform(0.0, 1.0)
        return t * d + rng.standard_normal() * np.eye(self.n)


def hill_equivalent_of_hosford2(surface: HosfordSurface) -> HillEllipsoid:
    """For p = 2, F(σ) = n|σ_D|², so K is the ellipsoid with B = (n/scale²)·Id."""
    if surface.p != 2.0:
        raise ValueError("only the p = 2 Hosford surface is an ellipsoid")
    m = surface.n * (surface.n + 1) // 2 - 1
    return HillEllipsoid.from_array(surface.n, surface.n / surface.scale**2 * np.eye(m))


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def project(surface: YieldSurface, x: Point) -> ProjectionResult:
    """Projection of x onto K (interval) or onto the cylinder K + ℝ·Id."""
    return surface.project(x)


def distance(surface: YieldSurface, x: Point) -> Union[float, np.ndarray]:
    """d(x) = |x - Π(x)|; for matrices this is d_K(x_D)."""
    return surface.project(x).distance


def support(surface: YieldSurface, q: Point) -> float:
    """Support function H(q) = sup_{τ ∈ K} τ·q."""
    return surface.support(q)


def _norm(x: Point) -> float:
    if isinstance(x, (float, int)):
        return abs(float(x))
    return float(np.linalg.norm(as_full(x)))


def projection_differential(surface: YieldSurface, x: Point, v: Point) -> float:
    """
    DΠ(x)v·v by central differences of the projection, step 1e-5·(1+|x|).

    Raises:
        DegenerateInput: x is inside K or too close to ∂K to difference.
    """
    d = float(distance(surface, x))
    h = 1e-5 * (1.0 + _norm(x))
    vnorm = _norm(v)
    if d <= 1e-8 or d <= 2.0 * h * vnorm:
        raise DegenerateInput(f"point at distance {d:.3e} is too close to the boundary")
    if isinstance(surface, IntervalSurface):
        xf, vf = float(x), float(v)  # type: ignore[arg-type]
        plus = surface.project(xf + h * vf).point
        minus = surface.project(xf - h * vf).point
        return float((plus - minus) / (2.0 * h) * vf)  # type: ignore[operator]
    xf, vf = as_full(x), as_full(v)
    plus = as_full(surface.project(xf + h * vf).point)
    minus = as_full(surface.project(xf - h * vf).point)
    return float(np.sum((plus - minus) * vf) / (2.0 * h))


def estimate_curvature(surface: YieldSurface, samples: int = 10_000, seed: int = 0) -> CurvatureEstimate:
    """
    Sampled C_K: minimum over boundary points y and tangent directions v of
    D²F(y)v·v / |DF(y)|.

    Raises:
        NotSmooth: a quotient is non-finite or non-positive.
    """
    if isinstance(surface, IntervalSurface):
        return CurvatureEstimate(value=None, samples=0, applicable=False, note="not applicable, 1D")
    if not isinstance(surface, CylindricalSurface):
        raise TypeError(f"unsupported surface {surface!r}")
    rng = np.random.default_rng(seed)
    quotients = surface.curvature_quotients(samples, rng)
    if not np.all(np.isfinite(quotients)) or float(np.min(quotients)) <= 0.0:
        raise NotSmooth(
            f"degenerate curvature quotient (min {np.nanmin(quotients):.3e}); widen sampling"
        )
    value = float(np.min(quotients))
    LOG.debug("curvature of %s over %d samples: %.6g", surface.kind, quotients.size, value)
    return CurvatureEstimate(value=value, samples=int(quotients.size))


# ---------------------------------------------------------------------------
# Axiom audit
# ---------------------------------------------------------------------------

@dataclass
class GeometryReport:
    """Result of a randomized audit of the projection axioms."""
    valid: bool
    samples: int
    idempotence: float = 0.0
    nonexpansive_excess: float = 0.0
    ray_error: float = 0.0
    inequality_slack_sq: float = math.inf
    inequality_slack_rk: float = math.inf
    gradient_error: float = 0.0
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "samples": self.samples,
            "idempotence": self.idempotence,
            "nonexpansiveExcess": self.nonexpansive_excess,
            "rayError": self.ray_error,
            "inequalitySlackSq": self.inequality_slack_sq,
            "inequalitySlackRk": self.inequality_slack_rk,
            "gradientError": self.gradient_error,
            "error": self.error,
        }


def _sub(a: Point, b: Point) -> Union[float, np.ndarray]:
    if isinstance(a, (float, int)) and isinstance(b, (float, int)):
        return float(a) - float(b)
    return as_full(a) - as_full(b)


def _dot(a: Union[float, np.ndarray], b: Union[float, np.ndarray]) -> float:
    return float(np.sum(np.asarray(a) * np.asarray(b)))


def verify_projection_axioms(surface: YieldSurface, samples: int = 1000, seed: int = 0) -> GeometryReport:
    """
    Idempotence, nonexpansiveness, ray property, the two inequalities
    (x - Π(x))·x ≥ d² and ≥ r_K d, and ∇d² = 2(x - Π(x)) on random samples.
    """
    rng = np.random.default_rng(seed)
    report = GeometryReport(valid=True, samples=samples)
    for _ in range(samples):
        x = surface.random_point(rng)
        y = surface.random_point(rng)
        px = surface.project(x)
        py = surface.project(y)
        again = surface.project(px.point).point
        report.idempotence = max(report.idempotence, _norm(_sub(again, px.point)))
        excess = _norm(_sub(px.point, py.point)) - _norm(_sub(x, y))
        report.nonexpansive_excess = max(report.nonexpansive_excess, excess)

        d = float(px.distance)
        if d <= 1e-8:
            continue
        normal = _sub(x, px.point)
        s = rng.uniform(0.0, 3.0)
        moved = surface.project(_sub(px.point, -s * normal / d) if not isinstance(normal, float)
                                else float(px.point) + s * normal / d).point  # type: ignore[arg-type]
        report.ray_error = max(report.ray_error, _norm(_sub(moved, px.point)))

        lhs = _dot(normal, as_full(x) if not isinstance(x, float) else x)
        report.inequality_slack_sq = min(report.inequality_slack_sq, lhs - d * d)
        report.inequality_slack_rk = min(report.inequality_slack_rk, lhs - surface.r_k * d)

        if isinstance(x, float):
            e: Union[float, np.ndarray] = 1.0
        else:
            e = surface.random_point(rng, spread=1.0)
            e = e / np.linalg.norm(e)
        h = 1e-5 * (1.0 + _norm(x))
        xp = x + h * e  # type: ignore[operator]
        xm = x - h * e  # type: ignore[operator]
        fd = (float(distance(surface, xp)) ** 2 - float(distance(surface, xm)) ** 2) / (2.0 * h)
        analytic = 2.0 * _dot(normal, e)
        report.gradient_error = max(report.gradient_error, abs(fd - analytic) / (2.0 * d))

    failures = []
    if report.idempotence > 1e-12 * (1.0 + surface.R_k):
        failures.append(f"idempotence {report.idempotence:.3e}")
    if report.nonexpansive_excess > 1e-10:
        failures.append(f"nonexpansiveness excess {report.nonexpansive_excess:.3e}")
    if report.ray_error > 1e-9:
        failures.append(f"ray property {report.ray_error:.3e}")
    if report.inequality_slack_sq < -1e-10 or report.inequality_slack_rk < -1e-10:
        failures.append("distance inequalities violated")
    if report.gradient_error > 1e-6:
        failures.append(f"gradient of d² mismatch {report.gradient_error:.3e}")
    if failures:
        report.valid = False
        report.error = "; ".join(failures)
    return report
