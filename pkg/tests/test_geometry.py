"""
Tests for domains, metrics, grids and exponent bookkeeping.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from lqplab.errors import GeometryError, PreconditionError
from lqplab.geometry import (
    ChartDomain,
    DiagonalMetric,
    ExponentPair,
    ExponentVerdict,
    build_grid,
    conformal_rescale,
    reciprocal,
    sobolev_exponent_check,
    volume,
)


def test_unit_interval_volume():
    """Test that the Euclidean unit interval has volume one."""
    domain = ChartDomain.interval(0.0, 1.0)
    grid = build_grid(domain, 16)
    length = volume(domain, DiagonalMetric.euclidean(1), grid)
    assert length == pytest.approx(1.0, abs=1e-14)


def test_horocyclic_rectangle_volume():
    """The e^z density integrates to 2(e - 1) over [-1, 1] x [0, 1]."""
    domain = ChartDomain.halfplane(1.0, 0.0, 1.0)
    grid = build_grid(domain, (5, 801))
    value = volume(domain, DiagonalMetric.horocyclic(), grid)
    assert value == pytest.approx(2.0 * (math.e - 1.0), abs=1e-6)


def test_horocyclic_metric_coefficients():
    points = np.array([[0.3, 0.0], [-1.0, 1.5]])
    g = DiagonalMetric.horocyclic().diagonal(points)
    np.testing.assert_allclose(g[0], np.exp(2.0 * points[:, 1]))
    np.testing.assert_allclose(g[1], 1.0)


def test_conformal_rescale_flattens_y_direction():
    """Rescaling the horocyclic metric by e^{-z} makes g_yy identically one."""
    rho = lambda pts: np.exp(-np.atleast_2d(pts)[:, 1])  # noqa: E731
    flat = conformal_rescale(DiagonalMetric.horocyclic(), rho)
    points = np.array([[0.0, -0.5], [2.0, 3.0]])
    np.testing.assert_allclose(flat.diagonal(points)[0], 1.0)


def test_conformal_rescale_rejects_nonpositive_factor():
    with pytest.raises(GeometryError, match="positive"):
        conformal_rescale(
            DiagonalMetric.euclidean(2),
            lambda pts: np.zeros(len(pts)),
            np.zeros((3, 2)),
        )


def test_ball_grid_measures():
    """Graded polar and spherical grids integrate the ball volume exactly."""
    disc = build_grid(ChartDomain.ball(2), (16, 32))
    assert disc.coordinates == "polar"
    assert disc.measure == pytest.approx(math.pi, rel=1e-12)
    ball = build_grid(ChartDomain.ball(3), (12, 12, 24))
    assert ball.coordinates == "spherical"
    assert ball.measure == pytest.approx(4.0 * math.pi / 3.0, rel=1e-12)


def test_periodic_grid_has_no_endpoint():
    grid = build_grid(ChartDomain.circle(2 * math.pi), 8)
    assert grid.size == 8
    assert grid.points[-1, 0] < 2 * math.pi
    assert grid.spacing == pytest.approx((2 * math.pi / 8,))
    assert grid.measure == pytest.approx(2 * math.pi)


def test_grid_errors():
    with pytest.raises(GeometryError, match="at least"):
        build_grid(ChartDomain.circle(), 2)
    with pytest.raises(GeometryError, match="singular point"):
        build_grid(ChartDomain.torus([1.0, 1.0]), 8, grading=2.0)
    with pytest.raises(GeometryError, match="Expected 2"):
        build_grid(ChartDomain.torus([1.0, 1.0]), (8, 8, 8))


def test_domain_validation():
    with pytest.raises(GeometryError, match="z_min <= 0 < z_max"):
        ChartDomain.halfplane(1.0, 0.5, 2.0)
    with pytest.raises(GeometryError, match="radius"):
        ChartDomain.ball(2, 0.0)
    with pytest.raises(GeometryError, match="Unknown domain kind"):
        ChartDomain("sphere", 2, ((0, 1), (0, 1)), (False, False))


def test_domain_round_trip_and_contains():
    torus = ChartDomain.torus([1.0, 2.0])
    assert ChartDomain.from_dict(torus.to_dict()) == torus
    assert torus.is_closed and torus.has_finite_volume
    ball = ChartDomain.ball(2)
    mask = ball.contains(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]))
    assert mask.tolist() == [True, True, False]
    assert ball.contains(np.array([[1.0, 0.0]]), strict=True).tolist() == [False]
    assert not ChartDomain.halfplane(4.0, -1.0, 4.0).has_finite_volume


def test_reciprocal_parsing():
    assert reciprocal("inf") == 0
    assert reciprocal("4/3") == Fraction(3, 4)
    assert reciprocal(2) == Fraction(1, 2)
    assert reciprocal(float("inf")) == 0
    with pytest.raises(PreconditionError, match="positive"):
        reciprocal(0)


def test_exponent_pair_conjugates():
    pair = ExponentPair.of("4/3", 8)
    assert pair.p_conjugate == pytest.approx(4.0)
    assert pair.q_conjugate == pytest.approx(8.0 / 7.0)
    assert pair.s == pytest.approx(1.0 / (1.0 + 1.0 / 8.0 - 3.0 / 4.0))
    assert ExponentPair.of(1, "inf").endpoint
    with pytest.raises(PreconditionError):
        ExponentPair.of(0.5, 2)


def test_sobolev_exponent_check_boundaries():
    """The condition 1/p - 1/q <= 1/n is decided exactly at the boundary."""
    strict = sobolev_exponent_check(ExponentPair.of(2, 2), 2)
    assert strict.verdict is ExponentVerdict.STRICT
    boundary = sobolev_exponent_check(ExponentPair.of("4/3", 4), 2)
    assert boundary.verdict is ExponentVerdict.BOUNDARY
    assert boundary.critical_exponent == pytest.approx(4.0)
    violated = sobolev_exponent_check(ExponentPair.of("4/3", 8), 2)
    assert violated.verdict is ExponentVerdict.VIOLATED
    assert not violated.admissible
    assert sobolev_exponent_check(ExponentPair.of(3, 3), 2).branch == "p >= n"
