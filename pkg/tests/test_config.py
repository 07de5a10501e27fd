"""Tests for scenario-file parsing and serialization."""

import math
from pathlib import Path

import pytest

from plastiflow.config import (
    apply_overrides,
    build_plan,
    dump_config,
    load_config,
    parse_config,
    reference_solution,
)
from plastiflow.exact import EvolutionaryExact, StationaryExact


SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"

MINIMAL = """
[scenario]
length = 1.0
nx = 64

[right]
mode = dirichlet
kind = linear
amplitude = 1.0

[run]
solver = quasistatic
t_end = 2.0
"""

LOADED = """
[body_force]
time_kind = constant
time_amplitude = 0.2

[load_potential]
time_kind = constant
time_amplitude = -0.2
space_kind = linear
space_amplitude = 1.0
"""


class TestParse:
    def test_minimal_defaults(self):
        spec = parse_config(MINIMAL)
        assert spec.solver == "quasistatic"
        assert spec.t_end == 2.0
        assert spec.scenario.t_end == 2.0
        assert spec.scenario.grid.nx == 64
        assert spec.scenario.surface.r_k == 1.0
        assert spec.scenario.load_potential is None
        assert spec.alpha == 0.1
        assert spec.lam == 1000.0

    def test_shipped_exponential_pull(self):
        spec = load_config(SCENARIOS / "exponential_pull.cfg")
        sc = spec.scenario
        assert sc.grid.nx == 400
        assert sc.right.data.kind == "exponential"
        assert spec.probes == (0.25, 0.5, 0.75)
        assert spec.windows == ((0.2, 0.8), (0.95, 1.0))
        assert spec.sweep_alphas == (0.4, 0.2, 0.1, 0.05)
        sc.validate(spec.t_end)

    def test_shipped_files_validate(self):
        for path in sorted(SCENARIOS.glob("*.cfg")):
            spec = load_config(path)
            spec.scenario.validate(spec.t_end)

    def test_missing_scenario_section(self):
        with pytest.raises(ValueError, match=r"\[scenario\]"):
            parse_config("[run]\nt_end = 1.0\n")

    def test_bad_window(self):
        with pytest.raises(ValueError, match="lo:hi"):
            parse_config(MINIMAL + "windows = 0.2\n")

    def test_unknown_solver(self):
        with pytest.raises(ValueError, match="solver"):
            parse_config(MINIMAL.replace("quasistatic", "implicit"))

    def test_non_interval_surface_rejected(self):
        with pytest.raises(ValueError, match="interval"):
            parse_config(MINIMAL + "\n[surface]\nkind = hosford\n")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValueError, match="does not exist"):
            load_config(tmp_path / "nope.cfg")


class TestRoundTrip:
    @pytest.mark.parametrize("name", ["exponential_pull.cfg", "stationary_plastic.cfg", "quasistatic_ramp.cfg"])
    def test_reparses_identically(self, name):
        spec = load_config(SCENARIOS / name)
        text = dump_config(spec)
        assert parse_config(text) == spec
        assert dump_config(parse_config(text)) == text

    def test_load_potential_and_margin_survive(self):
        text = MINIMAL.replace("nx = 64", "nx = 64\nsafe_load_margin = 0.5") + LOADED
        spec = parse_config(text)
        assert spec.scenario.safe_load_margin == 0.5
        assert spec.scenario.load_potential.space.kind == "linear"
        assert parse_config(dump_config(spec)) == spec


class TestOverrides:
    def test_apply(self):
        spec = parse_config(MINIMAL)
        out = apply_overrides(spec, alpha=0.05, lam=50.0, nx=128, dt=1e-3, t_end=4.0)
        assert (out.alpha, out.lam, out.dt, out.t_end) == (0.05, 50.0, 1e-3, 4.0)
        assert out.scenario.grid.nx == 128
        assert out.scenario.t_end == 4.0

    def test_no_overrides_is_identity(self):
        spec = parse_config(MINIMAL)
        assert apply_overrides(spec) == spec

    def test_default_time_step_is_cfl_bound(self):
        spec = parse_config(MINIMAL)
        assert spec.time_step == pytest.approx(0.9 * spec.scenario.grid.dx)


class TestDerived:
    def test_reference_for_exponential_pull(self):
        spec = load_config(SCENARIOS / "exponential_pull.cfg")
        ref = reference_solution(spec)
        assert isinstance(ref, EvolutionaryExact)
        assert ref.t0 == pytest.approx(math.log(math.tanh(1.0) / 0.5))

    def test_reference_for_stationary(self):
        ref = reference_solution(load_config(SCENARIOS / "stationary_plastic.cfg"))
        assert isinstance(ref, StationaryExact)
        assert ref.atom == pytest.approx(1.0 - math.tanh(1.0))

    def test_no_reference_for_ramp(self):
        assert reference_solution(parse_config(MINIMAL)) is None

    def test_build_plan_broadcasts_lambda(self):
        plan = build_plan(load_config(SCENARIOS / "exponential_pull.cfg"))
        assert plan.cells == ((0.4, 1000.0), (0.2, 1000.0), (0.1, 1000.0), (0.05, 1000.0))
        assert plan.window == (0.2, 0.8)
        assert plan.boundary_window == (0.95, 1.0)
        assert plan.seed == 0

    def test_build_plan_needs_alphas(self):
        with pytest.raises(ValueError, match="alphas"):
            build_plan(parse_config(MINIMAL))
