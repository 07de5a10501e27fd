"""Tests for scenario construction and validation."""

import math

import numpy as np
import pytest

from plastiflow.errors import ScenarioError
from plastiflow.scenario import (
    BoundaryCondition,
    FieldSpec,
    Grid1D,
    Scenario,
    SpaceProfile,
    TimeFunction,
)


A = 0.5
SHAPE = A / math.sinh(1.0)


def make_pull_scenario(nx: int = 100, **overrides) -> Scenario:
    """Bar clamped at x = 0 and pulled by w(t) = 0.5 e^t at x = 1."""
    params = dict(
        grid=Grid1D(1.0, nx),
        right=BoundaryCondition("dirichlet", TimeFunction("exponential", amplitude=A, rate=1.0)),
        sigma0=SpaceProfile("cosh", amplitude=SHAPE),
        v0=SpaceProfile("sinh", amplitude=SHAPE),
        u0=SpaceProfile("sinh", amplitude=SHAPE),
    )
    params.update(overrides)
    return Scenario(**params)


class TestBuiltins:
    def test_time_kinds(self):
        assert TimeFunction("linear", amplitude=2.0, offset=1.0)(3.0) == pytest.approx(7.0)
        assert TimeFunction("exponential", amplitude=0.5, rate=2.0)(1.0) == pytest.approx(0.5 * math.e**2)
        assert TimeFunction("sinusoid", amplitude=1.0, rate=2.0)(math.pi / 4) == pytest.approx(1.0)

    def test_time_rate(self):
        tf = TimeFunction("exponential", amplitude=0.5, rate=1.0)
        assert tf.rate_of_change(0.0) == pytest.approx(0.5)
        assert TimeFunction("constant", amplitude=3.0).rate_of_change(1.0) == 0.0

    def test_space_derivative(self):
        sp = SpaceProfile("sine", amplitude=2.0, wavenumber=3.0)
        x = np.linspace(0.0, 1.0, 5)
        assert np.allclose(sp.derivative(x), 6.0 * np.cos(3.0 * x))

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown time kind"):
            TimeFunction("cubic")
        with pytest.raises(ValueError, match="unknown space kind"):
            SpaceProfile("tanh")

    def test_field_spec_is_separable(self):
        fs = FieldSpec(TimeFunction("linear", amplitude=1.0), SpaceProfile("linear", amplitude=2.0))
        x = np.array([0.0, 0.5, 1.0])
        assert np.allclose(fs.at(2.0, x), 2.0 * 2.0 * x)
        assert np.allclose(fs.rate(2.0, x), 2.0 * x)
        assert np.allclose(fs.gradient(2.0, x), 4.0)

    def test_boundary_mode_checked(self):
        with pytest.raises(ValueError, match="mode"):
            BoundaryCondition("robin")


class TestGrid:
    def test_spacing(self):
        g = Grid1D(2.0, 21)
        assert g.dx == pytest.approx(0.1)
        assert g.x[-1] == pytest.approx(2.0)

    def test_too_coarse(self):
        with pytest.raises(ValueError, match="nx >= 16"):
            Grid1D(1.0, 8)


class TestLift:
    def test_linear_interpolation_of_walls(self):
        sc = make_pull_scenario()
        lift = sc.lift(0.0)
        assert lift[0] == pytest.approx(0.0)
        assert lift[-1] == pytest.approx(A)
        assert sc.lift_slope(0.0) == pytest.approx(A)

    def test_rate_lift(self):
        sc = make_pull_scenario()
        assert sc.lift(1.0, rate=True)[-1] == pytest.approx(A * math.e)

    def test_neumann_end_copies_other_wall(self):
        sc = make_pull_scenario(left=BoundaryCondition("neumann", TimeFunction("constant", 0.0)))
        assert np.allclose(sc.lift(0.0), A)
        assert sc.lift_slope(0.0) == 0.0
        assert sc.has_neumann

    def test_initial_fields_default_to_lift(self):
        sc = Scenario(
            grid=Grid1D(1.0, 32),
            right=BoundaryCondition("dirichlet", TimeFunction("linear", amplitude=1.0)),
        )
        sigma, v, u = sc.initial_fields()
        assert np.allclose(sigma, 0.0)
        assert np.allclose(v, sc.grid.x)
        assert np.allclose(u, 0.0)


class TestValidate:
    def test_pull_scenario_is_valid(self):
        make_pull_scenario().validate(2.0)

    def test_incompatible_initial_velocity(self):
        sc = make_pull_scenario(v0=SpaceProfile("constant", 0.0))
        with pytest.raises(ScenarioError, match="compatibility"):
            sc.validate()

    def test_initial_stress_outside_k(self):
        sc = make_pull_scenario(sigma0=SpaceProfile("constant", 1.5))
        with pytest.raises(ScenarioError, match="leaves K"):
            sc.validate()

    def test_body_force_needs_load_potential(self):
        sc = make_pull_scenario(body_force=FieldSpec(TimeFunction("constant", 1.0), SpaceProfile("constant", 1.0)))
        with pytest.raises(ScenarioError, match="load potential is required"):
            sc.validate()

    def test_safe_load_margin_violated(self):
        # rho = -0.95 x balances f = 0.95 but leaves only 0.05 of room
        force = FieldSpec(TimeFunction("constant", 0.95), SpaceProfile("constant", 1.0))
        rho = FieldSpec(TimeFunction("constant", -0.95), SpaceProfile("linear", amplitude=1.0))
        sc = make_pull_scenario(body_force=force, load_potential=rho, safe_load_margin=0.1)
        with pytest.raises(ScenarioError, match="safe-load margin"):
            sc.validate()

    def test_unbalanced_load_potential(self):
        force = FieldSpec(TimeFunction("constant", 0.2), SpaceProfile("constant", 1.0))
        rho = FieldSpec(TimeFunction("constant", 0.2), SpaceProfile("linear", amplitude=1.0))
        sc = make_pull_scenario(body_force=force, load_potential=rho, safe_load_margin=0.1)
        with pytest.raises(ScenarioError, match="does not balance"):
            sc.validate()

    def test_balanced_load_is_accepted(self):
        force = FieldSpec(TimeFunction("constant", 0.2), SpaceProfile("constant", 1.0))
        rho = FieldSpec(TimeFunction("constant", -0.2), SpaceProfile("linear", amplitude=1.0))
        make_pull_scenario(body_force=force, load_potential=rho, safe_load_margin=0.5).validate()

    def test_interior_load_without_declared_margin(self):
        force = FieldSpec(TimeFunction("constant", 0.2), SpaceProfile("constant", 1.0))
        rho = FieldSpec(TimeFunction("constant", -0.2), SpaceProfile("linear", amplitude=1.0))
        sc = make_pull_scenario(body_force=force, load_potential=rho)
        sc.validate()
        assert sc.load_margin(np.array([0.0, 1.0])) == pytest.approx(0.8)

    def test_load_touching_k_without_declared_margin(self):
        force = FieldSpec(TimeFunction("constant", 1.0), SpaceProfile("constant", 1.0))
        rho = FieldSpec(TimeFunction("constant", -1.0), SpaceProfile("linear", amplitude=1.0))
        sc = make_pull_scenario(body_force=force, load_potential=rho)
        with pytest.raises(ScenarioError, match="leaves no room"):
            sc.validate()

    def test_equilibrium_required(self):
        sc = make_pull_scenario(require_equilibrium=True)
        with pytest.raises(ScenarioError, match="equilibrium"):
            sc.validate()

    def test_non_positive_compliance(self):
        with pytest.raises(ValueError, match="compliance"):
            make_pull_scenario(compliance=0.0)
