"""
Exception hierarchy.

Invalid inputs raise ValueError subclasses; numerical failures raise
PlastiflowError subclasses so callers (the CLI, the sweep runner) can map
them to distinct exit codes or per-cell failure records.
"""

from __future__ import annotations

from typing import Optional


class ScenarioError(ValueError):
    """A scenario or run configuration violates one of its invariants."""


class PlastiflowError(RuntimeError):
    """Base class for numerical failures."""


class NonConvergence(PlastiflowError):
    """An inner iterative projection or ascent missed its tolerance."""


class DegenerateInput(PlastiflowError):
    """Input too close to a singular configuration for stable differencing."""


class NotSmooth(PlastiflowError):
    """Curvature quotients degenerated (non-finite or non-positive)."""


class NotApplicable(PlastiflowError):
    """The requested check has no meaning for this surface kind."""


class BracketFailure(PlastiflowError):
    """Geometric bracket growth for a monotone root exceeded its cap."""


class PotentialOverflow(PlastiflowError):
    """A power of (1 + d²∧λ²) left the representable range."""


class RootFindFailure(PlastiflowError):
    """A scalar monotone root-find did not converge."""


class CflViolation(ScenarioError, PlastiflowError):
    """Time step exceeds the elastic stability bound."""


class WindowTooSmall(PlastiflowError):
    """Seminorm window holds fewer than four grid nodes."""


class ReductionUnavailable(PlastiflowError):
    """The quasi-static ODE reduction does not apply to this scenario."""


class NewtonDivergence(PlastiflowError):
    """Damped Newton failed, even with continuation in alpha."""


class SolveFailure(PlastiflowError):
    """A sweep cell failed; carries the cell id."""

    def __init__(self, message: str, cell_id: Optional[str] = None):
        super().__init__(message)
        self.cell_id = cell_id
