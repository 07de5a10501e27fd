"""
Symmetric-matrix utilities.

SymMatrix stores the upper triangle of a symmetric n×n matrix (n = 1, 2, 3).
All geometry works on full numpy arrays with the Frobenius inner product;
this module converts between the two, splits off the hydrostatic part,
maps deviatoric matrices to orthonormal coordinates (used for Hill's
B-operator), and diagonalizes 2×2 / 3×3 symmetric matrices in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

ArrayLike = Union[np.ndarray, Sequence[Sequence[float]]]


@dataclass(frozen=True)
class SymMatrix:
    """Symmetric n×n matrix stored as its row-major upper triangle."""
    n: int
    entries: Tuple[float, ...]

    def __post_init__(self) -> None:
        if self.n not in (1, 2, 3):
            raise ValueError(f"SymMatrix dimension must be 1, 2 or 3, got {self.n}")
        expected = self.n * (self.n + 1) // 2
        if len(self.entries) != expected:
            raise ValueError(
                f"SymMatrix of dimension {self.n} needs {expected} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_full(cls, m: ArrayLike) -> "SymMatrix":
        arr = np.asarray(m, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {arr.shape}")
        n = arr.shape[0]
        sym = 0.5 * (arr + arr.T)
        iu = np.triu_indices(n)
        return cls(n=n, entries=tuple(float(v) for v in sym[iu]))

    @classmethod
    def identity(cls, n: int) -> "SymMatrix":
        return cls.from_full(np.eye(n))

    @classmethod
    def diag(cls, *values: float) -> "SymMatrix":
        return cls.from_full(np.diag(values))

    def full(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        iu = np.triu_indices(self.n)
        out[iu] = self.entries
        return out + np.triu(out, 1).T

    @property
    def trace(self) -> float:
        return float(np.trace(self.full()))

    def norm(self) -> float:
        return float(np.linalg.norm(self.full()))


def as_full(x: Union[SymMatrix, ArrayLike]) -> np.ndarray:
    """Full symmetric ndarray view of a SymMatrix or array input."""
    if isinstance(x, SymMatrix):
        return x.full()
    return np.asarray(x, dtype=float)


def deviatoric_split(m: Union[SymMatrix, ArrayLike]) -> Tuple[SymMatrix, float]:
    """
    Split m into its trace-free part and its trace.

    Returns:
        (dev, trace) with dev + (trace/n)·Id = m and tr(dev) = 0.
    """
    full = as_full(m)
    n = full.shape[0]
    tr = float(np.trace(full))
    dev = full - (tr / n) * np.eye(n)
    # exact zero trace up to rounding of the last diagonal entry
    dev[n - 1, n - 1] = -float(np.trace(dev[: n - 1, : n - 1])) if n > 1 else 0.0
    return SymMatrix.from_full(dev), tr


def dev_full(x: np.ndarray) -> Tuple[np.ndarray, float]:
    """Array version of deviatoric_split: (x_D, tr(x))."""
    n = x.shape[0]
    tr = float(np.trace(x))
    return x - (tr / n) * np.eye(n), tr


def deviatoric_basis(n: int) -> np.ndarray:
    """
    Orthonormal basis of the trace-free symmetric n×n matrices.

    Diagonal directions come first, then off-diagonal pairs (i < j) in
    row-major order. Shape (m, n, n) with m = n(n+1)/2 - 1.
    """
    basis = []
    # Helmert-type trace-free diagonal directions
    for k in range(1, n):
        d = np.zeros(n)
        d[:k] = 1.0
        d[k] = -float(k)
        d /= np.linalg.norm(d)
        basis.append(np.diag(d))
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n))
            e[i, j] = e[j, i] = 1.0 / math.sqrt(2.0)
            basis.append(e)
    if not basis:
        return np.zeros((0, n, n))
    return np.array(basis)


def to_dev_coords(x: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return np.einsum("kij,ij->k", basis, x)


def from_dev_coords(c: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return np.einsum("k,kij->ij", c, basis)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _null_vector(a: np.ndarray, lam: float) -> np.ndarray:
    """Unit vector spanning the kernel of (a - lam·Id) for an isolated eigenvalue."""
    m = a - lam * np.eye(3)
    candidates = (np.cross(m[0], m[1]), np.cross(m[0], m[2]), np.cross(m[1], m[2]))
    best = max(candidates, key=lambda c: float(np.dot(c, c)))
    return _unit(best)


def _eigh_lapack(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """numpy.linalg.eigh reordered to descending eigenvalues."""
    vals, vecs = np.linalg.eigh(a)
    return vals[::-1].copy(), vecs[:, ::-1].copy()


def _eigh2(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    p, q, r = a[0, 0], a[0, 1], a[1, 1]
    mean = 0.5 * (p + r)
    rad = math.hypot(0.5 * (p - r), q)
    theta = 0.5 * math.atan2(2.0 * q, p - r)
    c, s = math.cos(theta), math.sin(theta)
    vecs = np.array([[c, -s], [s, c]])
    return np.array([mean + rad, mean - rad]), vecs


def _eigh3(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    p1 = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
    scale = max(float(np.max(np.abs(a))), 1e-300)
    if p1 <= (1e-15 * scale) ** 2:
        d = np.diag(a).copy()
        order = np.argsort(-d)
        return d[order], np.eye(3)[:, order]

    q = np.trace(a) / 3.0
    p2 = float(np.sum((np.diag(a) - q) ** 2) + 2.0 * p1)
    p = math.sqrt(p2 / 6.0)
    b = (a - q * np.eye(3)) / p
    r = float(np.linalg.det(b)) / 2.0
    # rounding can leave r marginally outside [-1, 1]
    if r <= -1.0:
        phi = math.pi / 3.0
    elif r >= 1.0:
        phi = 0.0
    else:
        phi = math.acos(r) / 3.0
    l1 = q + 2.0 * p * math.cos(phi)
    l3 = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    l2 = 3.0 * q - l1 - l3
    vals = np.array([l1, l2, l3])

    # acos loses accuracy like eps·scale²/gap near a double root
    tol = 1e-3 * scale
    if min(l1 - l2, l2 - l3) <= tol:
        return _eigh_lapack(a)

    # the eigenvalue with the wider gap is isolated; its vector is well conditioned
    if l1 - l2 >= l2 - l3:
        v1 = _null_vector(a, l1)
        v2 = _null_vector(a, l2)
        v2 = _unit(v2 - np.dot(v2, v1) * v1)
        v3 = np.cross(v1, v2)
    else:
        v3 = _null_vector(a, l3)
        v1 = _null_vector(a, l1)
        v1 = _unit(v1 - np.dot(v1, v3) * v3)
        v2 = np.cross(v3, v1)
    return vals, np.column_stack([v1, v2, v3])


def eigh_sym(a: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """
    Closed-form eigendecomposition of a symmetric 1×1, 2×2 or 3×3 matrix.

    Returns:
        (values, vectors): eigenvalues in descending order and the matching
        orthonormal eigenvectors as columns, so a = Q diag(values) Qᵀ.
        Coalesced eigenvalues get an arbitrary orthonormal basis of their
        eigenspace.
    """
    arr = np.asarray(a, dtype=float)
    n = arr.shape[0]
    if n == 1:
        return arr[0].copy(), np.ones((1, 1))
    if n == 2:
        return _eigh2(arr)
    if n == 3:
        return _eigh3(arr)
    raise ValueError(f"eigh_sym supports n <= 3, got n={n}")
