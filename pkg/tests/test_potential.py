"""Tests for the regularized Norton-Hoff potential."""

import math

import numpy as np
import pytest

from plastiflow.errors import NotApplicable, PotentialOverflow
from plastiflow.geometry import IntervalSurface, VonMisesBall
from plastiflow.potential import (
    RadialProfile,
    RegularizedPotential,
    chain_rule_curvature_check,
    dgamma,
    dgamma_field,
    fenchel_conjugate,
    gamma,
    verify_gradient_inequalities,
)


UNIT = IntervalSurface(-1.0, 1.0)


def make_pot(alpha: float = 1.0, lam: float = 10.0, surface=UNIT) -> RegularizedPotential:
    return RegularizedPotential(alpha, lam, surface)


class TestRadialProfile:
    def test_exponent(self):
        assert RadialProfile(1.0 / 3.0, 10.0).exponent == pytest.approx(1.0)
        assert RadialProfile(1.0, 10.0).exponent == pytest.approx(0.0)

    def test_dphi_is_g_times_r(self):
        prof = RadialProfile(0.2, 5.0)
        r = np.linspace(0.0, 8.0, 17)
        assert np.allclose(prof.dphi(r), prof.g(r) * r)

    def test_dphi_matches_finite_difference_of_phi(self):
        prof = RadialProfile(0.25, 3.0)
        for r in (0.3, 1.7, 2.9, 4.5):
            h = 1e-6
            fd = (prof.phi(r + h) - prof.phi(r - h)) / (2.0 * h)
            assert fd == pytest.approx(prof.dphi(r), rel=1e-6)

    def test_seam_is_continuous(self):
        prof = RadialProfile(0.5, 2.0)
        eps = 1e-9
        assert prof.phi(2.0 - eps) == pytest.approx(prof.phi(2.0 + eps), rel=1e-8)
        assert prof.dphi(2.0 - eps) == pytest.approx(prof.dphi(2.0 + eps), rel=1e-8)

    def test_g_frozen_beyond_lambda(self):
        prof = RadialProfile(0.2, 2.0)
        assert prof.g(5.0) == pytest.approx(prof.g(2.0))

    def test_inverse_dphi(self):
        prof = RadialProfile(0.1, 1000.0)
        s = np.array([0.0, 0.5, 1.0, 40.0])
        r = prof.inverse_dphi(s)
        assert np.allclose(prof.dphi(r), s, rtol=1e-9, atol=1e-10)

    def test_inverse_dphi_rejects_negative(self):
        with pytest.raises(ValueError, match="non-negative"):
            RadialProfile(0.5, 1.0).inverse_dphi(-1.0)

    def test_overflow_is_structured(self):
        prof = RadialProfile(0.001, 1000.0)
        with pytest.raises(PotentialOverflow, match="exceeds"):
            prof.g(100.0)


class TestGamma:
    def test_floor_inside_k(self):
        pot = make_pot(alpha=0.2)
        assert gamma(pot, 0.4) == pytest.approx(0.2 / 1.2)
        assert pot.floor == pytest.approx(0.2 / 1.2)

    def test_hand_value(self):
        assert gamma(make_pot(alpha=1.0, lam=10.0), 2.0) == pytest.approx(1.0)

    def test_matrix_argument_uses_deviatoric_distance(self):
        pot = make_pot(alpha=1.0, surface=VonMisesBall(n=2, radius=1.0))
        xi = np.diag([math.sqrt(2.0), -math.sqrt(2.0)]) + 3.0 * np.eye(2)
        # |ξ_D| = 2, d = 1
        assert gamma(pot, xi) == pytest.approx(1.0)

    def test_rejects_bad_alpha(self):
        with pytest.raises(ValueError, match="alpha"):
            make_pot(alpha=0.0)
        with pytest.raises(ValueError, match="lambda"):
            make_pot(lam=-1.0)


class TestDGamma:
    def test_zero_inside(self):
        assert dgamma(make_pot(), 0.9) == 0.0

    def test_alpha_one(self):
        assert dgamma(make_pot(alpha=1.0), 2.0) == pytest.approx(1.0)

    def test_alpha_one_third(self):
        assert dgamma(make_pot(alpha=1.0 / 3.0, lam=10.0), 2.0) == pytest.approx(2.0)

    def test_sign_below_k(self):
        assert dgamma(make_pot(alpha=1.0), -3.0) == pytest.approx(-2.0)

    def test_matrix_gradient_is_trace_free(self):
        pot = make_pot(alpha=0.5, surface=VonMisesBall(n=3))
        xi = np.diag([3.0, 1.0, -0.5]) + np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]])
        grad = dgamma(pot, xi)
        assert np.trace(grad) == pytest.approx(0.0, abs=1e-12)

    def test_matrix_gradient_matches_finite_difference(self):
        pot = make_pot(alpha=0.5, lam=10.0, surface=VonMisesBall(n=3))
        xi = np.diag([2.0, -0.5, -1.5])
        e = np.array([[0.0, 0.3, 0.0], [0.3, 1.0, 0.0], [0.0, 0.0, -1.0]])
        h = 1e-6
        fd = (gamma(pot, xi + h * e) - gamma(pot, xi - h * e)) / (2.0 * h)
        assert fd == pytest.approx(float(np.sum(dgamma(pot, xi) * e)), rel=1e-6)

    def test_field_version(self):
        pot = make_pot(alpha=1.0)
        out = dgamma_field(pot, np.array([-2.0, 0.0, 2.0]))
        assert np.allclose(out, [-1.0, 0.0, 1.0])


class TestFenchelConjugate:
    def test_at_zero(self):
        pot = make_pot(alpha=0.25)
        assert fenchel_conjugate(pot, 0.0) == pytest.approx(-0.25 / 1.25, abs=1e-9)

    def test_young_equality_at_gradient(self):
        pot = make_pot(alpha=0.5, lam=10.0)
        for xi in (1.3, 2.0, -4.0):
            eta = dgamma(pot, xi)
            assert gamma(pot, xi) + fenchel_conjugate(pot, eta) == pytest.approx(xi * eta, rel=1e-8)

    def test_young_inequality(self):
        pot = make_pot(alpha=0.3, lam=10.0, surface=VonMisesBall(n=3))
        rng = np.random.default_rng(0)
        for _ in range(20):
            xi = pot.surface.random_point(rng)
            eta = pot.surface.random_point(rng)
            eta = eta - np.trace(eta) / 3.0 * np.eye(3)
            assert gamma(pot, xi) + fenchel_conjugate(pot, eta) >= float(np.sum(xi * eta)) - 1e-9

    def test_rejects_hydrostatic_part(self):
        pot = make_pot(surface=VonMisesBall(n=3))
        with pytest.raises(ValueError, match="trace-free"):
            fenchel_conjugate(pot, np.eye(3))


class TestGradientInequalities:
    def test_hand_point(self):
        report = verify_gradient_inequalities(make_pot(alpha=1.0), points=[2.0])
        assert report.valid
        # Dγ·ξ = 2 against g·d² = 1 and r_K·g·d = 1
        assert report.slack_sq == pytest.approx(1.0 / 3.0)

    def test_inside_point_has_zero_slack(self):
        report = verify_gradient_inequalities(make_pot(), points=[0.5])
        assert report.slack_sq == 0.0

    def test_random_von_mises(self):
        report = verify_gradient_inequalities(make_pot(alpha=0.2, lam=100.0, surface=VonMisesBall()),
                                              samples=1000)
        assert report.valid, report.error


class TestChainRule:
    def test_constant_field(self):
        report = chain_rule_curvature_check(make_pot(), np.full(20, 3.0), dx=0.1)
        assert report.valid
        assert report.min_slack == pytest.approx(0.0)

    def test_interval_linear_field(self):
        x = np.linspace(0.0, 3.0, 301)
        report = chain_rule_curvature_check(make_pot(alpha=0.5), 2.0 * x - 1.0, dx=x[1] - x[0])
        assert report.valid
        assert report.mode == "scalar"

    def test_von_mises_linear_field_crossing_boundary(self):
        pot = make_pot(alpha=0.5, surface=VonMisesBall(n=3))
        direction = np.diag([1.0, -1.0, 0.0]) / math.sqrt(2.0)
        s = np.linspace(0.0, 3.0, 301)
        field = s[:, None, None] * direction[None, :, :]
        report = chain_rule_curvature_check(pot, field, dx=s[1] - s[0])
        assert report.valid
        assert report.curvature == pytest.approx(1.0)

    def test_inside_field_both_sides_zero(self):
        pot = make_pot(surface=VonMisesBall(n=2))
        field = np.zeros((10, 2, 2))
        report = chain_rule_curvature_check(pot, field, dx=0.1)
        assert report.min_slack == 0.0

    def test_deviatoric_mode_on_interval(self):
        with pytest.raises(NotApplicable):
            chain_rule_curvature_check(make_pot(), np.zeros(10), dx=0.1, mode="deviatoric")


class TestFenchelIdentity:
    @pytest.mark.parametrize("alpha,lam", [(1.0, 10.0), (0.5, 10.0), (0.3, 2.0), (0.2, 100.0),
                                           (0.1, 1000.0), (0.05, 1000.0)])
    def test_young_equality_on_random_points(self, alpha, lam):
        pot = make_pot(alpha=alpha, lam=lam, surface=VonMisesBall(n=3))
        rng = np.random.default_rng(11)
        for _ in range(1000):
            xi = pot.surface.random_point(rng, spread=2.0)
            grad = dgamma(pot, xi)
            pairing = float(np.sum(xi * grad))
            gap = gamma(pot, xi) + fenchel_conjugate(pot, grad) - pairing
            assert abs(gap) <= 1e-9 * (1.0 + abs(pairing))
