"""
Tests for the averaged homotopy operator and Poincare primitives.
"""

import math

import numpy as np
import pytest
import sympy

from lqplab.errors import (
    FormError,
    GeometryError,
    InadmissibleExponents,
    PreconditionError,
)
from lqplab.forms import exterior_derivative, symbolic_form
from lqplab.geometry import ChartDomain, build_grid
from lqplab.homotopy import (
    BoundStatus,
    HomotopyConfig,
    averaged_homotopy,
    cone_homotopy,
    homotopy_residual,
    poincare_primitive,
    random_polynomial_form,
    riesz_bound,
    symmetric_base,
)

DISC = ChartDomain.ball(2)


@pytest.fixture
def disc_grid():
    return build_grid(DISC, (8, 16))


def test_riesz_bound_values():
    """For p = q = 2 the kernel norm is |S^{n-1}| R."""
    assert riesz_bound(2, 2, 2).kernel_norm == pytest.approx(2 * math.pi)
    assert riesz_bound(3, 2, 2).kernel_norm == pytest.approx(4 * math.pi)
    assert riesz_bound(2, "4/3", 4).status is BoundStatus.BOUNDARY
    assert riesz_bound(2, "4/3", 8).status is BoundStatus.INADMISSIBLE
    with pytest.raises(PreconditionError, match="Diameter"):
        riesz_bound(2, 2, 2, diameter=0.0)


@pytest.mark.parametrize("degree", [1, 2])
def test_homotopy_formula_on_polynomial_forms(disc_grid, degree):
    """T d + d T = identity up to quadrature on random polynomial forms."""
    rng = np.random.default_rng(degree)
    config = symmetric_base(2, 0.25)
    for _ in range(2):
        theta = random_polynomial_form(DISC, degree, 2, rng)
        assert homotopy_residual(theta, config, disc_grid) <= 1e-8


def trigonometric_form(domain, degree, rng):
    """Sums of plane waves with small integer frequencies and half-integer phases."""
    symbols = sympy.symbols("x y z", real=True)[: domain.dim]
    components = []
    for _ in range(math.comb(domain.dim, degree)):
        frequencies = rng.integers(-2, 3, size=domain.dim)
        phase = sympy.Rational(int(rng.integers(0, 4)), 2)
        wave = sum(int(f) * s for f, s in zip(frequencies, symbols)) + phase
        amplitude = int(rng.integers(1, 4))
        drift = sympy.cos(symbols[0] - symbols[-1])
        components.append(amplitude * sympy.sin(wave) + drift)
    return symbolic_form(degree, domain, components)


@pytest.mark.parametrize("n, degree", [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3)])
def test_homotopy_formula_in_every_degree(n, degree):
    """T d + d T = identity on six polynomial and six trigonometric forms."""
    ball = ChartDomain.ball(n)
    grid = build_grid(ball, (6, 12) if n == 2 else (4, 4, 6))
    config = symmetric_base(n, 0.25)
    rng = np.random.default_rng(10 * n + degree)
    forms = [random_polynomial_form(ball, degree, 3, rng) for _ in range(6)]
    forms += [trigonometric_form(ball, degree, rng) for _ in range(6)]
    for theta in forms:
        assert homotopy_residual(theta, config, grid) <= 1e-8


def test_residual_falls_with_radial_order(disc_grid):
    x = sympy.Symbol("x", real=True)
    theta = symbolic_form(1, DISC, [sympy.sin(30 * x), sympy.Integer(0)])
    configs = [symmetric_base(2, 0.25, radial_order=order) for order in (16, 32)]
    residuals = [homotopy_residual(theta, c, disc_grid, 1e-4) for c in configs]
    assert residuals[1] <= 1e-2 * residuals[0]


def test_cone_homotopy_of_constant_two_form():
    """K_0 (dx ^ dy) = (x dy - y dx) / 2."""
    area = symbolic_form(2, DISC, [sympy.Integer(1)])
    points = np.array([[0.3, -0.2], [0.0, 0.5]])
    eta = cone_homotopy(area, [0.0, 0.0])(points)
    np.testing.assert_allclose(eta[0], -points[:, 1] / 2, atol=1e-14)
    np.testing.assert_allclose(eta[1], points[:, 0] / 2, atol=1e-14)


def test_primitive_of_exact_form(disc_grid):
    x, y = sympy.symbols("x y", real=True)
    omega = exterior_derivative(symbolic_form(0, DISC, [x**2 * y + y**3]))
    report = poincare_primitive(omega, 2, 2, symmetric_base(2, 0.25), disc_grid)
    assert report.residual <= 1e-8
    assert report.bound.kernel_norm == pytest.approx(2 * math.pi)
    assert report.within_bound is True
    assert report.to_dict()["bound"]["status"] == "admissible"


def test_primitive_on_boundary_has_no_constant(disc_grid):
    x, y = sympy.symbols("x y", real=True)
    omega = exterior_derivative(symbolic_form(0, DISC, [x * y]))
    config = HomotopyConfig.point([0.0, 0.0])
    report = poincare_primitive(omega, "4/3", 4, config, disc_grid)
    assert report.within_bound is None


def test_primitive_refuses_inadmissible_exponents(disc_grid):
    """Beyond 1/p - 1/q = 1/n the ball witness forbids bounded primitives."""
    omega = symbolic_form(1, DISC, [sympy.Integer(1), sympy.Integer(0)])
    with pytest.raises(InadmissibleExponents, match="ball witness"):
        poincare_primitive(omega, "4/3", 8, symmetric_base(2, 0.25), disc_grid)


def test_primitive_refuses_non_closed_form(disc_grid):
    x, y = sympy.symbols("x y", real=True)
    rotation = symbolic_form(1, DISC, [-y, x])
    with pytest.raises(FormError, match="not closed"):
        poincare_primitive(rotation, 2, 2, symmetric_base(2, 0.25), disc_grid)


def test_homotopy_config_validation():
    with pytest.raises(GeometryError, match="sum to 1"):
        HomotopyConfig(np.zeros((2, 2)), np.array([0.5, 0.6]))
    with pytest.raises(GeometryError, match="One weight"):
        HomotopyConfig(np.zeros((2, 2)), np.ones(1))
    with pytest.raises(GeometryError, match="strictly inside"):
        HomotopyConfig.point([1.0, 0.0]).check_inside(DISC)
    with pytest.raises(FormError, match="k >= 1"):
        cone_homotopy(symbolic_form(0, DISC, [sympy.Integer(1)]), [0.0, 0.0])


def test_averaged_homotopy_is_weighted_cone_average():
    theta = random_polynomial_form(DISC, 1, 2, np.random.default_rng(5))
    config = symmetric_base(2, 0.25)
    points = np.array([[0.1, -0.2], [0.4, 0.3], [-0.5, 0.0]])
    expected = sum(
        w * cone_homotopy(theta, a)(points)
        for a, w in zip(config.nodes, config.weights)
    )
    averaged = averaged_homotopy(theta, config)(points)
    np.testing.assert_allclose(averaged, expected, atol=1e-12)
