"""Tests for yield-surface geometry."""

import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from plastiflow.errors import DegenerateInput
from plastiflow.geometry import (
    HillEllipsoid,
    HosfordSurface,
    IntervalSurface,
    VonMisesBall,
    distance,
    estimate_curvature,
    hill_equivalent_of_hosford2,
    hosford_f,
    project,
    projection_differential,
    support,
    verify_projection_axioms,
)
from plastiflow.linalg import SymMatrix


UNIT = IntervalSurface(-1.0, 1.0)


def make_hill(n: int = 3, seed: int = 0) -> HillEllipsoid:
    """Random well-conditioned Hill ellipsoid."""
    m = n * (n + 1) // 2 - 1
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(m, m))
    return HillEllipsoid.from_array(n, a @ a.T / m + 0.5 * np.eye(m))


def hosford_boundary_points(theta: np.ndarray, p: float, scale: float = 1.0) -> np.ndarray:
    """Boundary points along the angle theta in the trace-free eigenvalue plane."""
    e1 = np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0)
    e2 = np.array([1.0, 1.0, -2.0]) / math.sqrt(6.0)
    u = np.cos(theta)[:, None] * e1 + np.sin(theta)[:, None] * e2
    f = np.abs(u[:, 0] - u[:, 1]) ** p + np.abs(u[:, 0] - u[:, 2]) ** p + np.abs(u[:, 1] - u[:, 2]) ** p
    return scale * u / f[:, None] ** (1.0 / p)


def hosford_boundary_samples(p: float, count: int, scale: float = 1.0) -> np.ndarray:
    return hosford_boundary_points(np.linspace(0.0, 2.0 * math.pi, count, endpoint=False), p, scale)


def hosford_projection_oracle(lam: np.ndarray, p: float, scale: float = 1.0) -> np.ndarray:
    """Eigenvalues of the Hosford projection: nearest point on the boundary curve."""
    target = lam - lam.mean()
    theta = np.linspace(0.0, 2.0 * math.pi, 20_000, endpoint=False)
    k = int(np.argmin(np.sum((hosford_boundary_points(theta, p, scale) - target) ** 2, axis=1)))
    step = theta[1] - theta[0]

    def gap(t: float) -> float:
        return float(np.sum((hosford_boundary_points(np.array([t]), p, scale)[0] - target) ** 2))

    res = minimize_scalar(gap, bounds=(theta[k] - step, theta[k] + step), method="bounded",
                          options={"xatol": 1e-12})
    return np.sort(hosford_boundary_points(np.array([res.x]), p, scale)[0])[::-1]


class TestInterval:
    def test_projects_outside_point(self):
        res = project(UNIT, 1.5)
        assert res.point == 1.0
        assert res.distance == pytest.approx(0.5)
        assert not res.inside

    def test_inside_point_is_fixed(self):
        res = project(UNIT, 0.3)
        assert res.point == 0.3
        assert res.inside

    def test_vectorized(self):
        res = project(UNIT, np.array([-3.0, 0.0, 2.0]))
        assert np.allclose(res.point, [-1.0, 0.0, 1.0])
        assert np.allclose(res.distance, [2.0, 0.0, 1.0])

    def test_asymmetric_radii_and_support(self):
        k = IntervalSurface(-0.5, 2.0)
        assert k.r_k == 0.5
        assert k.R_k == 2.0
        assert support(k, 3.0) == pytest.approx(6.0)
        assert support(k, -3.0) == pytest.approx(1.5)

    def test_requires_zero_in_interior(self):
        with pytest.raises(ValueError, match="contain 0"):
            IntervalSurface(0.0, 1.0)

    def test_axioms(self):
        report = verify_projection_axioms(IntervalSurface(-0.5, 2.0), samples=500)
        assert report.valid, report.error

    def test_curvature_not_applicable(self):
        est = estimate_curvature(UNIT)
        assert not est.applicable
        assert est.value is None


class TestVonMises:
    def test_projection_keeps_trace(self):
        ball = VonMisesBall(n=3, radius=1.0)
        x = np.diag([3.0, 0.0, 0.0]) + 5.0 * np.eye(3)
        res = project(ball, x)
        # x_D = diag(2, -1, -1) has norm sqrt(6)
        assert res.distance == pytest.approx(math.sqrt(6.0) - 1.0)
        assert np.trace(res.point) == pytest.approx(np.trace(x))
        dev = res.point - np.trace(res.point) / 3.0 * np.eye(3)
        assert np.linalg.norm(dev) == pytest.approx(1.0)

    def test_sym_matrix_in_sym_matrix_out(self):
        ball = VonMisesBall(n=2, radius=0.5)
        res = project(ball, SymMatrix.diag(2.0, -2.0))
        assert isinstance(res.point, SymMatrix)
        assert res.point.norm() == pytest.approx(0.5)

    def test_hydrostatic_point_is_inside(self):
        assert distance(VonMisesBall(), 7.0 * np.eye(3)) == 0.0

    def test_support_is_radius_times_dev_norm(self):
        ball = VonMisesBall(n=3, radius=2.0)
        q = np.diag([1.0, -1.0, 0.0])
        assert support(ball, q) == pytest.approx(2.0 * math.sqrt(2.0))

    def test_wrong_shape(self):
        with pytest.raises(ValueError, match="3x3"):
            project(VonMisesBall(n=3), np.eye(2))

    def test_curvature_is_inverse_radius(self):
        est = estimate_curvature(VonMisesBall(n=3, radius=2.0), samples=200)
        assert est.applicable
        assert est.value == pytest.approx(0.5, rel=1e-4)

    def test_axioms(self):
        report = verify_projection_axioms(VonMisesBall(n=3), samples=300)
        assert report.valid, report.error


class TestHill:
    def test_radii_from_eigenvalues(self):
        b = np.diag([4.0, 1.0, 1.0, 1.0, 0.25])
        hill = HillEllipsoid.from_array(3, b)
        assert hill.r_k == pytest.approx(0.5)
        assert hill.R_k == pytest.approx(2.0)
        assert hill.curvature_bound == pytest.approx(0.25 / 2.0)

    def test_projection_lands_on_boundary(self):
        hill = make_hill()
        rng = np.random.default_rng(3)
        for _ in range(20):
            x = hill.random_point(rng)
            res = project(hill, x)
            if res.inside:
                continue
            dev = res.point - np.trace(res.point) / 3.0 * np.eye(3)
            assert hill.defining_value(dev) == pytest.approx(1.0, abs=1e-10)

    def test_support_matches_sampled_boundary(self):
        hill = make_hill(seed=2)
        # trace-free q, so the hydrostatic part of the samples drops out
        q = np.array([[1.0, 0.2, 0.0], [0.2, -0.5, 0.3], [0.0, 0.3, -0.5]])
        rng = np.random.default_rng(0)
        best = max(float(np.sum(project(hill, hill.random_point(rng, spread=10.0)).point * q))
                   for _ in range(2000))
        assert support(hill, q) >= best - 1e-9

    def test_rejects_non_positive_definite(self):
        with pytest.raises(ValueError, match="positive definite"):
            HillEllipsoid.from_array(2, np.diag([1.0, -1.0]))

    def test_rejects_wrong_size(self):
        with pytest.raises(ValueError, match="5x5"):
            HillEllipsoid.from_array(3, np.eye(4))

    def test_curvature_matches_bound_on_axes(self):
        b = np.diag([4.0, 2.0, 1.0, 1.0, 1.0])
        hill = HillEllipsoid.from_array(3, b)
        est = estimate_curvature(hill, samples=200)
        assert est.value == pytest.approx(hill.curvature_bound, rel=1e-3)

    def test_axioms(self):
        report = verify_projection_axioms(make_hill(), samples=200)
        assert report.valid, report.error


class TestHosford:
    def test_p2_is_an_ellipsoid(self):
        hos = HosfordSurface(n=3, p=2.0)
        hill = hill_equivalent_of_hosford2(hos)
        rng = np.random.default_rng(1)
        for _ in range(10):
            x = hos.random_point(rng)
            assert distance(hos, x) == pytest.approx(distance(hill, x), abs=1e-8)

    def test_p2_radius(self):
        # F = n|σ_D|² on trace-free matrices
        hos = HosfordSurface(n=3, p=2.0)
        assert hos.r_k == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-8)
        assert hos.R_k == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-8)

    def test_p4_radii_ordered(self):
        hos = HosfordSurface(n=3, p=4.0)
        assert 0.0 < hos.r_k < hos.R_k

    def test_projection_lands_on_level_set(self):
        hos = HosfordSurface(n=3, p=4.0, scale=1.5)
        x = np.diag([3.0, -1.0, -2.0])
        res = project(hos, x)
        dev = res.point - np.trace(res.point) / 3.0 * np.eye(3)
        assert hos.defining_value(dev) == pytest.approx(1.5 ** 4, rel=1e-10)

    def test_symmetric_diagonal_projection(self):
        hos = HosfordSurface(n=3, p=4.0)
        res = project(hos, np.diag([1.5, 0.0, -1.5]))
        assert hos.defining_value(res.point) == pytest.approx(1.0, rel=1e-10)
        assert np.allclose(np.diag(res.point), hosford_projection_oracle(np.array([1.5, 0.0, -1.5]), 4.0), atol=1e-6)

    @pytest.mark.parametrize("gap", [1e-5, 1e-7, 1e-9])
    def test_rotated_near_tie_projection(self, gap):
        hos = HosfordSurface(n=3, p=4.0)
        lam = np.array([1.5 + gap, 1.5, -3.0])
        q = np.linalg.qr(np.random.default_rng(3).normal(size=(3, 3)))[0]
        res = project(hos, q @ np.diag(lam) @ q.T)
        expected = q @ np.diag(hosford_projection_oracle(lam, 4.0)) @ q.T + lam.mean() * np.eye(3)
        assert np.allclose(res.point, res.point.T, atol=1e-14)
        assert hos.defining_value(res.point) == pytest.approx(1.0, rel=1e-10)
        assert np.allclose(res.point, expected, atol=1e-6)

    @pytest.mark.parametrize("p", [3.0, 4.0, 8.0])
    def test_projection_matches_constrained_minimizer(self, p):
        hos = HosfordSurface(n=3, p=p, scale=1.2)
        lam = np.array([2.0, 0.3, -2.3])
        res = project(hos, np.diag(lam))
        assert np.allclose(np.diag(res.point), hosford_projection_oracle(lam, p, scale=1.2), atol=1e-6)

    @pytest.mark.parametrize("p", [3.0, 4.0])
    def test_support_matches_dense_boundary(self, p):
        hos = HosfordSurface(n=3, p=p)
        mu = np.array([2.0, -0.5, -1.5])
        sampled = float(np.max(hosford_boundary_samples(p, 200_000) @ mu))
        assert support(hos, np.diag(mu)) == pytest.approx(sampled, rel=1e-6)

    def test_support_of_p2_matches_hill(self):
        hos = HosfordSurface(n=3, p=2.0)
        hill = hill_equivalent_of_hosford2(hos)
        q = np.diag([2.0, -0.5, -1.5])
        assert support(hos, q) == pytest.approx(support(hill, q), rel=1e-6)

    def test_curvature_positive(self):
        est = estimate_curvature(HosfordSurface(n=3, p=4.0), samples=500)
        assert est.value > 0.0

    def test_exponent_below_two_rejected(self):
        with pytest.raises(ValueError, match="p >= 2"):
            HosfordSurface(p=1.5)

    @pytest.mark.slow
    def test_axioms(self):
        report = verify_projection_axioms(HosfordSurface(n=3, p=4.0), samples=100)
        assert report.valid, report.error


class TestProjectionDifferential:
    def test_interval_outside_is_flat(self):
        assert projection_differential(UNIT, 2.0, 1.0) == pytest.approx(0.0)

    def test_ball_tangential_direction(self):
        # DΠ(x) v·v = (r/|x|)|v|² for v tangent to the sphere
        ball = VonMisesBall(n=3, radius=1.0)
        x = 2.0 * np.diag([1.0, -1.0, 0.0]) / math.sqrt(2.0)
        v = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]) / math.sqrt(2.0)
        assert projection_differential(ball, x, v) == pytest.approx(0.5, rel=1e-6)

    def test_nonnegative_on_random_samples(self):
        hill = make_hill(seed=5)
        rng = np.random.default_rng(7)
        for _ in range(20):
            x = hill.random_point(rng, spread=5.0)
            if distance(hill, x) < 1e-3:
                continue
            v = hill.random_point(rng, spread=1.0)
            assert projection_differential(hill, x, v) >= -1e-8

    def test_inside_point_is_degenerate(self):
        with pytest.raises(DegenerateInput):
            projection_differential(UNIT, 0.5, 1.0)

    def test_hosford_bounded_by_curvature(self):
        # on trace-free directions DΠ(x)v·v ≤ |v|²/(1 + C_K d(x))
        hos = HosfordSurface(n=3, p=3.0)
        c_k = estimate_curvature(hos, samples=2000).value
        rng = np.random.default_rng(11)
        checked = 0
        for _ in range(30):
            x = hos.random_point(rng, spread=3.0)
            d = float(distance(hos, x))
            if d < 0.05:
                continue
            v = rng.standard_normal((3, 3))
            v = 0.5 * (v + v.T)
            v -= np.trace(v) / 3.0 * np.eye(3)
            bound = float(np.sum(v * v)) / (1.0 + c_k * d)
            assert projection_differential(hos, x, v) <= bound * (1.0 + 2e-2) + 1e-6
            checked += 1
        assert checked > 10


@pytest.mark.slow
class TestHosfordCurvature:
    @pytest.mark.parametrize("p", [2.0, 3.0, 4.0, 8.0])
    def test_positive(self, p):
        est = estimate_curvature(HosfordSurface(n=3, p=p), samples=10_000)
        assert est.applicable
        assert est.value > 0.0


@pytest.mark.slow
class TestAxiomsAtScale:
    @pytest.mark.parametrize("surface", [
        IntervalSurface(-0.5, 2.0),
        VonMisesBall(n=3),
        VonMisesBall(n=2, radius=0.7),
        make_hill(),
        HosfordSurface(n=3, p=4.0),
        HosfordSurface(n=3, p=3.0, scale=1.5),
    ], ids=["interval", "von_mises3", "von_mises2", "hill", "hosford4", "hosford3"])
    def test_thousand_samples(self, surface):
        report = verify_projection_axioms(surface, samples=1000)
        assert report.valid, report.error
        assert report.samples == 1000
