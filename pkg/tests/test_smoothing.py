"""
Tests for the de Rham deformations, the mollifier and the regularization.
"""

import numpy as np
import pytest
import sympy

from lqplab.errors import FormError, GeometryError
from lqplab.forms import analytic_form, symbolic_form
from lqplab.geometry import ChartDomain, build_grid
from lqplab.homotopy import symmetric_base
from lqplab.smoothing import (
    DeRhamDeformation,
    MollifierSpec,
    continuity_defect,
    homotopy_A,
    homotopy_A_residual,
    operator_norm_probe,
    regularization_ladder,
    regularize,
    s_v_apply,
)

CHART = ChartDomain.box([(-1.5, 1.5), (-1.5, 1.5)])


@pytest.fixture
def deformation():
    return DeRhamDeformation.unit(2)


@pytest.fixture
def omega():
    x, y = sympy.symbols("x y", real=True)
    return symbolic_form(1, CHART, [sympy.sin(x) * y, sympy.cos(x + y)])


def test_deformation_is_local(deformation):
    """s_v fixes every point outside the ball and moves points inside."""
    outside = np.array([[1.0, 0.0], [1.2, -0.7], [0.0, -1.5]])
    np.testing.assert_array_equal(s_v_apply(outside, [0.3, 0.1], deformation), outside)
    inside = np.array([[0.0, 0.0], [0.2, -0.1]])
    moved = s_v_apply(inside, [0.3, 0.1], deformation)
    assert np.all(np.linalg.norm(moved - inside, axis=1) > 0)
    assert np.all(np.linalg.norm(moved, axis=1) < 1.0)


def test_zero_shift_is_identity(deformation):
    points = np.random.default_rng(0).uniform(-0.6, 0.6, (10, 2))
    moved = s_v_apply(points, [0.0, 0.0], deformation)
    np.testing.assert_allclose(moved, points, atol=1e-12)
    with pytest.raises(GeometryError, match="finite"):
        s_v_apply(points, [np.inf, 0.0], deformation)


def test_continuity_across_sphere(deformation):
    assert continuity_defect(deformation, [0.01, 0.01]) <= 1e-2
    with pytest.raises(GeometryError, match="planar"):
        continuity_defect(DeRhamDeformation.unit(3), [0.0, 0.0, 0.0])


def test_shift_near_the_sphere_stays_finite():
    """h reaches e^500 at r = 0.999; its inverse must not square that."""
    x = np.array([[0.999, 0.0], [0.0, -0.9995]])
    moved = s_v_apply(x, [0.01, 0.0], DeRhamDeformation.unit(2))
    assert np.all(np.isfinite(moved))
    assert np.all(np.linalg.norm(moved, axis=1) < 1.0)
    np.testing.assert_allclose(moved, x, atol=1e-12)


def test_mollifier_weights():
    spec = MollifierSpec.build(2, 0.1, 9)
    assert np.sum(spec.weights) == pytest.approx(1.0)
    assert np.all(spec.weights > 0)
    assert np.all(np.linalg.norm(spec.shifts, axis=1) < 0.1)
    with pytest.raises(GeometryError, match="positive"):
        MollifierSpec.build(2, 0.0)


def test_regularization_is_local(deformation, omega):
    smoothed = regularize(omega, deformation, MollifierSpec.build(2, 0.05, 7))
    outside = np.array([[1.1, 0.0], [-1.3, 1.3], [0.0, 1.0]])
    np.testing.assert_array_equal(smoothed(outside), omega(outside))
    assert smoothed.differential is not None


def test_regularization_ladder_decreases(deformation, omega):
    """||R_eps omega - omega||_2 shrinks as eps does."""
    grid = build_grid(CHART, 13)
    ladder = regularization_ladder(
        omega, deformation, [0.2, 0.1, 0.05], grid, nodes_per_axis=9
    )
    assert ladder.strictly_decreasing
    assert len(ladder.total_variation) == 3
    assert ladder.to_dict()["epsilons"] == [0.2, 0.1, 0.05]


def test_homotopy_A_formula(deformation, omega):
    """(I - R) omega = d A omega + A d omega at interior points."""
    mollifier = MollifierSpec.build(2, 0.05, 6)
    config = symmetric_base(2, 0.25)
    points = np.array([[0.1, 0.2], [-0.3, 0.1]])
    residual = homotopy_A_residual(omega, deformation, mollifier, config, points)
    assert residual <= 1e-6


def test_homotopy_A_vanishes_outside_ball(deformation, omega):
    mollifier = MollifierSpec.build(2, 0.05, 5)
    a_omega = homotopy_A(omega, deformation, mollifier, symmetric_base(2, 0.25))
    assert a_omega.degree == 0
    outside = np.array([[1.1, 0.0], [-1.2, 0.9]])
    np.testing.assert_array_equal(a_omega(outside), 0.0)


def test_operator_norm_probe(deformation, omega):
    grid = build_grid(CHART, 9)
    mollifier = MollifierSpec.build(2, 0.05, 5)
    report = operator_norm_probe([omega], deformation, mollifier, grid, 2, 2)
    assert len(report.ratios) == 1
    assert 0.5 < report.maximum < 2.0
    assert report.to_dict()["epsilon"] == 0.05
    with pytest.raises(FormError, match="at least one"):
        operator_norm_probe([], deformation, mollifier, grid, 2, 2)


def test_regularization_fixes_forms_supported_outside_the_ball(deformation):
    """R_eps only moves values inside the ball, so the graph-norm ratio is one."""

    def bump_outside(x, y):
        return np.maximum(x**2 + y**2 - 1.0, 0.0) ** 3

    def d_bump_outside(x, y):
        return -6.0 * y * np.maximum(x**2 + y**2 - 1.0, 0.0) ** 2

    area = analytic_form(2, CHART, [bump_outside])
    line = analytic_form(
        1, CHART, [bump_outside, 0.0], analytic_form(2, CHART, [d_bump_outside])
    )
    grid = build_grid(CHART, 12)
    mollifier = MollifierSpec.build(2, 0.05, 5)
    report = operator_norm_probe([area, line], deformation, mollifier, grid, 2, 2)
    assert report.ratios == pytest.approx([1.0, 1.0], abs=1e-14)
