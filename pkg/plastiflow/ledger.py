"""
Running energy balance of a 1D Norton-Hoff run.

    ½∫|v(t)|² + ½∫aσ(t)² + ∫₀ᵗ∫(γ(σ) + γ*(Dγ(σ)) − ρ·Dγ(σ))
        = ½∫|v₀|² + ½∫aσ₀² + ∫₀ᵗ∫(v̇·ẇ + ρ·(aσ̇ − ẇ_x) + ẇ_x·σ)

Callers supply the time-integrated dissipation and work of each step;
the ledger keeps the spatial energies and the residual LHS − RHS.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np
from scipy.integrate import trapezoid


@dataclass
class LedgerEntry:
    """Balance terms at one recorded time."""
    t: float
    kinetic: float
    elastic: float
    dissipation: float
    work: float
    residual: float


class EnergyLedger:
    """Trapezoid-rule energy bookkeeping on a fixed grid."""

    def __init__(self, x: np.ndarray, compliance: float, max_entries: Optional[int] = None):
        self.x = np.asarray(x, dtype=float)
        self.compliance = compliance
        self.max_entries = max_entries

        # Initial energies
        self.kinetic0: float = 0.0
        self.elastic0: float = 0.0

        # Running time integrals
        self.dissipation: float = 0.0
        self.work: float = 0.0

        self.kinetic: float = 0.0
        self.elastic: float = 0.0
        self.max_abs_residual: float = 0.0
        self._entries: List[LedgerEntry] = []

    def integrate(self, density: np.ndarray) -> float:
        return float(trapezoid(density, self.x))

    def start(self, t: float, sigma: np.ndarray, v: np.ndarray) -> None:
        self.kinetic0 = 0.5 * self.integrate(v * v)
        self.elastic0 = 0.5 * self.compliance * self.integrate(sigma * sigma)
        self.kinetic, self.elastic = self.kinetic0, self.elastic0
        self.dissipation = 0.0
        self.work = 0.0
        self._entries = [LedgerEntry(t, self.kinetic0, self.elastic0, 0.0, 0.0, 0.0)]

    def record(
        self,
        t: float,
        sigma: np.ndarray,
        v: np.ndarray,
        dissipation: float,
        work: float,
    ) -> LedgerEntry:
        """
        Append one step.

        Args:
            t: Time at the end of the step.
            sigma: Stress at the end of the step.
            v: Velocity at the end of the step.
            dissipation: Space-time integral of the dissipation density over the step.
            work: Space-time integral of the work density over the step.
        """
        self.kinetic = 0.5 * self.integrate(v * v)
        self.elastic = 0.5 * self.compliance * self.integrate(sigma * sigma)
        self.dissipation += dissipation
        self.work += work
        entry = LedgerEntry(
            t=t,
            kinetic=self.kinetic,
            elastic=self.elastic,
            dissipation=self.dissipation,
            work=self.work,
            residual=self.residual,
        )
        self.max_abs_residual = max(self.max_abs_residual, abs(entry.residual))
        self._entries.append(entry)
        if self.max_entries is not None and len(self._entries) > self.max_entries:
            self._entries = self._entries[-self.max_entries:]
        return entry

    @property
    def lhs(self) -> float:
        return self.kinetic + self.elastic + self.dissipation

    @property
    def rhs(self) -> float:
        return self.kinetic0 + self.elastic0 + self.work

    @property
    def residual(self) -> float:
        return self.lhs - self.rhs

    @property
    def relative_residual(self) -> float:
        """Largest |residual| seen, relative to the largest total energy scale."""
        scale = max(abs(self.lhs), abs(self.rhs), self.kinetic0 + self.elastic0, 1e-300)
        return self.max_abs_residual / scale

    @property
    def entries(self) -> List[LedgerEntry]:
        return list(self._entries)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kinetic0": self.kinetic0,
            "elastic0": self.elastic0,
            "kinetic": self.kinetic,
            "elastic": self.elastic,
            "dissipation": self.dissipation,
            "work": self.work,
            "residual": self.residual,
            "maxAbsResidual": self.max_abs_residual,
            "relativeResidual": self.relative_residual,
        }
