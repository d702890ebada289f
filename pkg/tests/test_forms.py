"""
Tests for differential forms: calculus, norms, pairings and pullbacks.
"""

import math

import numpy as np
import pytest
import sympy

from lqplab.errors import FormError, SingularJacobianError
from lqplab.forms import (
    AffineMap,
    codifferential,
    constant_form,
    exterior_derivative,
    exterior_derivative_matrix,
    hodge_star,
    inner_product,
    load_form,
    lp_norm,
    multi_indices,
    pairing_integral,
    pullback,
    sample,
    save_form,
    symbolic_form,
    wedge,
)
from lqplab.forms.form import DifferentialForm, Representation
from lqplab.forms.multiindex import merge_sign
from lqplab.geometry import ChartDomain, DiagonalMetric, build_grid

PLANE = ChartDomain.box([(-1.0, 1.0), (-1.0, 1.0)])


def test_multi_indices_are_lexicographic():
    assert multi_indices(3, 2) == ((0, 1), (0, 2), (1, 2))
    assert multi_indices(2, 0) == ((),)
    assert merge_sign((1,), (0,)) == -1
    assert merge_sign((0,), (0, 1)) == 0


def test_symbolic_differential():
    """d(x^2 y) = 2xy dx + x^2 dy and d(d f) = 0 identically."""
    x, y = sympy.symbols("x y", real=True)
    f = symbolic_form(0, PLANE, [x**2 * y])
    df = exterior_derivative(f)
    points = np.array([[0.5, -0.25], [0.1, 0.9]])
    expected = np.stack([2 * points[:, 0] * points[:, 1], points[:, 0] ** 2])
    np.testing.assert_allclose(df(points), expected)
    np.testing.assert_allclose(exterior_derivative(df)(points), 0.0)


def test_stencil_derivative_matches_exact():
    """The central stencil differentiates lazy forms to high accuracy."""
    x, y = sympy.symbols("x y", real=True)
    omega = symbolic_form(1, PLANE, [sympy.sin(x * y), sympy.cos(x) + y**2])
    lazy = DifferentialForm(1, PLANE, omega.evaluator, Representation.LAZY)
    points = np.random.default_rng(0).uniform(-0.5, 0.5, (20, 2))
    stencil = exterior_derivative(lazy)(points)
    np.testing.assert_allclose(stencil, omega.differential(points), atol=1e-9)


def test_top_degree_has_no_derivative():
    omega = constant_form(2, PLANE, [1.0])
    with pytest.raises(FormError, match="not defined"):
        exterior_derivative(omega)
    with pytest.raises(FormError, match="Degree"):
        constant_form(3, PLANE, [1.0])


def test_wedge_orientation():
    dx = constant_form(1, PLANE, [1.0, 0.0])
    dy = constant_form(1, PLANE, [0.0, 1.0])
    point = np.zeros((1, 2))
    assert wedge(dx, dy)(point)[0, 0] == 1.0
    assert wedge(dy, dx)(point)[0, 0] == -1.0
    assert np.all(wedge(dx, dx)(point) == 0.0)


def test_wedge_leibniz_rule():
    x, y = sympy.symbols("x y", real=True)
    f = symbolic_form(0, PLANE, [x * y])
    g = symbolic_form(1, PLANE, [y, x**2])
    product = wedge(f, g)
    assert product.differential is not None
    points = np.array([[0.3, 0.7]])
    lazy = DifferentialForm(1, PLANE, product.evaluator)
    np.testing.assert_allclose(
        exterior_derivative(lazy)(points), product.differential(points), atol=1e-9
    )


def test_euclidean_hodge_star():
    """*(dx) = dy and *(dy) = -dx in the plane."""
    metric = DiagonalMetric.euclidean(2)
    point = np.zeros((1, 2))
    star_dx = hodge_star(constant_form(1, PLANE, [1.0, 0.0]), metric)(point)
    star_dy = hodge_star(constant_form(1, PLANE, [0.0, 1.0]), metric)(point)
    np.testing.assert_allclose(star_dx[:, 0], [0.0, 1.0])
    np.testing.assert_allclose(star_dy[:, 0], [-1.0, 0.0])


def test_horocyclic_hodge_star():
    """*(dy) = e^{-z} dz for the metric e^{2z} dy^2 + dz^2."""
    domain = ChartDomain.halfplane(4.0, -1.0, 4.0)
    dy = constant_form(1, domain, [1.0, 0.0])
    points = np.array([[0.0, -0.5], [1.0, 2.0]])
    star = hodge_star(dy, DiagonalMetric.horocyclic())(points)
    np.testing.assert_allclose(star[0], 0.0)
    np.testing.assert_allclose(star[1], np.exp(-points[:, 1]))


def test_codifferential_of_linear_one_form():
    """delta(x dx + y dy) = -2 in the Euclidean plane."""
    x, y = sympy.symbols("x y", real=True)
    omega = symbolic_form(1, PLANE, [x, y])
    value = codifferential(omega, DiagonalMetric.euclidean(2))(np.array([[0.2, 0.4]]))
    assert value[0, 0] == pytest.approx(-2.0, abs=1e-8)
    with pytest.raises(FormError, match="0-form"):
        codifferential(symbolic_form(0, PLANE, [x]), DiagonalMetric.euclidean(2))


def test_lp_norms_on_circle():
    """||sin||_2 = sqrt(pi) and ||sin||_inf = 1 on the circle."""
    circle = ChartDomain.circle()
    x = sympy.Symbol("x", real=True)
    f = symbolic_form(0, circle, [sympy.sin(x)])
    grid = build_grid(circle, 64)
    metric = DiagonalMetric.euclidean(1)
    l2 = lp_norm(f, metric, grid, 2).value
    assert l2 == pytest.approx(math.sqrt(math.pi), rel=1e-12)
    assert lp_norm(f, metric, grid, float("inf")).value == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(FormError, match="Exponent"):
        lp_norm(f, metric, grid, 0.5)


def test_inner_product_and_pairing():
    box = ChartDomain.box([(0.0, 1.0), (0.0, 1.0)])
    grid = build_grid(box, 11)
    metric = DiagonalMetric.euclidean(2)
    dx = constant_form(1, box, [1.0, 0.0])
    dy = constant_form(1, box, [0.0, 1.0])
    assert inner_product(dx, dx, metric, grid) == pytest.approx(1.0)
    assert inner_product(dx, dy, metric, grid) == pytest.approx(0.0)
    assert pairing_integral(dx, dy, grid) == pytest.approx(1.0)
    with pytest.raises(FormError, match="complementary"):
        pairing_integral(dx, constant_form(2, box, [1.0]), grid)


def test_pullback_by_affine_maps():
    x, y = sympy.symbols("x y", real=True)
    omega = symbolic_form(1, PLANE, [x, y**2])
    points = np.array([[0.1, 0.2], [-0.3, 0.4]])
    shift = np.array([0.05, -0.1])
    moved = pullback(omega, AffineMap.translation(shift))(points)
    np.testing.assert_allclose(moved, omega(points + shift))
    scaled = pullback(omega, AffineMap(2.0 * np.eye(2)))(points)
    np.testing.assert_allclose(scaled, 2.0 * omega(2.0 * points))


def test_singular_pullback_raises():
    omega = constant_form(1, PLANE, [1.0, 1.0])
    flattened = pullback(omega, AffineMap(np.array([[1.0, 0.0], [0.0, 0.0]])))
    with pytest.raises(SingularJacobianError, match="Singular Jacobian"):
        flattened(np.zeros((3, 2)))


def test_forward_stencil_is_a_complex():
    """The staggered coboundary matrices compose to zero on the torus."""
    grid = build_grid(ChartDomain.torus([1.0, 2.0, 3.0]), 5)
    d0 = exterior_derivative_matrix(grid, 0)
    d1 = exterior_derivative_matrix(grid, 1)
    d2 = exterior_derivative_matrix(grid, 2)
    assert abs(d1 @ d0).max() < 1e-10
    assert abs(d2 @ d1).max() < 1e-10


def test_sampled_form_file(tmp_path):
    torus = ChartDomain.torus([2 * math.pi, 2 * math.pi])
    x, y = sympy.symbols("x y", real=True)
    grid = build_grid(torus, 8)
    sampled = sample(symbolic_form(1, torus, [sympy.sin(x), sympy.cos(y)]), grid)
    path = tmp_path / "omega.txt"
    save_form(sampled, grid, path)
    loaded = load_form(path)
    assert loaded.degree == 1
    np.testing.assert_allclose(loaded.values, sampled.values)
    (tmp_path / "bad.txt").write_text("1 2 3\n")
    with pytest.raises(FormError, match="not an lqplab form file"):
        load_form(tmp_path / "bad.txt")


def test_integration_by_parts_on_torus():
    """int d theta ^ gamma = -int theta ^ d gamma for a 0-form on a closed surface."""
    x, y = sympy.symbols("x y", real=True)
    torus = ChartDomain.torus([2 * math.pi, 2 * math.pi])
    grid = build_grid(torus, 32)
    theta = symbolic_form(0, torus, [sympy.sin(x) * sympy.cos(y) + sympy.cos(x)])
    gamma = symbolic_form(1, torus, [sympy.cos(x + y), sympy.sin(2 * x) + sympy.sin(x)])
    left = pairing_integral(exterior_derivative(theta), gamma, grid)
    right = pairing_integral(theta, exterior_derivative(gamma), grid)
    assert abs(left) > 1.0
    assert left == pytest.approx(-right, rel=1e-10)
