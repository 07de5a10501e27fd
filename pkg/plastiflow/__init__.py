"""
plastiflow: Norton-Hoff regularized perfect plasticity.

Yield-surface geometry, the regularized potential, 1D dynamic / quasi-static /
stationary solvers, closed-form reference solutions and α → 0 limit sweeps.

Usage:
    from plastiflow import IntervalSurface, RegularizedPotential, load_config, run

    spec = load_config("scenarios/exponential_pull.cfg")
    pot = RegularizedPotential(0.1, 1000.0, spec.scenario.surface)
    result = run(spec.scenario, pot, spec.time_step, spec.t_end)
    print(result.sup_distance, result.ledger.relative_residual)
"""

from .config import RunSpec, build_plan, dump_config, load_config, parse_config
from .dynamic import (
    RunResult,
    State1D,
    boundary_gap,
    elastic_substep,
    interior_h1_seminorm,
    measure_onset_time,
    relax_implicit,
    run,
    step,
)
from .errors import (
    CflViolation,
    PlastiflowError,
    ScenarioError,
    SolveFailure,
)
from .exact import (
    EvolutionaryExact,
    StationaryExact,
    evolutionary_eval,
    stationary_eval,
    verify_exact_solution,
)
from .geometry import (
    HillEllipsoid,
    HosfordSurface,
    IntervalSurface,
    VonMisesBall,
    YieldSurface,
    distance,
    estimate_curvature,
    project,
    projection_differential,
    support,
    verify_projection_axioms,
)
from .lab import LimitReport, SweepPlan, run_sweep, run_sweep_async
from .ledger import EnergyLedger
from .linalg import SymMatrix, deviatoric_split, eigh_sym
from .potential import (
    RegularizedPotential,
    chain_rule_curvature_check,
    dgamma,
    fenchel_conjugate,
    gamma,
    verify_gradient_inequalities,
)
from .quasistatic import qs_evolve, solve_stationary
from .scenario import BoundaryCondition, FieldSpec, Grid1D, Scenario, SpaceProfile, TimeFunction

__version__ = "0.1.0"

__all__ = [
    # Main API
    "run",
    "qs_evolve",
    "solve_stationary",
    "run_sweep",
    "run_sweep_async",
    "RunResult",
    "State1D",
    "SweepPlan",
    "LimitReport",
    # Scenarios
    "Scenario",
    "Grid1D",
    "BoundaryCondition",
    "FieldSpec",
    "SpaceProfile",
    "TimeFunction",
    "RunSpec",
    "load_config",
    "parse_config",
    "dump_config",
    "build_plan",
    # Geometry
    "YieldSurface",
    "IntervalSurface",
    "VonMisesBall",
    "HillEllipsoid",
    "HosfordSurface",
    "project",
    "distance",
    "support",
    "projection_differential",
    "estimate_curvature",
    "verify_projection_axioms",
    "SymMatrix",
    "deviatoric_split",
    "eigh_sym",
    # Potential
    "RegularizedPotential",
    "gamma",
    "dgamma",
    "fenchel_conjugate",
    "verify_gradient_inequalities",
    "chain_rule_curvature_check",
    # Solver pieces
    "elastic_substep",
    "relax_implicit",
    "step",
    "interior_h1_seminorm",
    "boundary_gap",
    "measure_onset_time",
    "EnergyLedger",
    # Reference solutions
    "StationaryExact",
    "EvolutionaryExact",
    "stationary_eval",
    "evolutionary_eval",
    "verify_exact_solution",
    # Errors
    "PlastiflowError",
    "ScenarioError",
    "CflViolation",
    "SolveFailure",
]
