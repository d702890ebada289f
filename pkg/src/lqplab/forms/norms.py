"""Pointwise norms, L^p norms, inner products and pairings of forms."""

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from lqplab.errors import FormError, GeometryError
from lqplab.forms.form import DifferentialForm
from lqplab.forms.multiindex import merge_sign
from lqplab.geometry import DiagonalMetric, Grid

Exponent = Union[int, float]


@dataclass(frozen=True)
class FormNormReport:
    """L^p norm of a form on a grid.

    ``value`` is the quadrature norm over the (possibly truncated) grid and
    ``tail_correction`` the amount by which the supplied analytic tail bound
    raises it; ``total`` is their sum.
    """

    p: float
    value: float
    tail_correction: float
    resolution: tuple

    @property
    def total(self) -> float:
        return self.value + self.tail_correction


def pointwise_norm(
    omega: DifferentialForm,
    metric: DiagonalMetric,
    points: Optional[np.ndarray] = None,
    values: Optional[np.ndarray] = None,
) -> np.ndarray:
    """``|w|_g`` at the points: ``sqrt(sum_I w_I^2 prod_{i in I} 1/g_ii)``."""
    if points is None:
        raise FormError("pointwise_norm needs evaluation points")
    points = np.atleast_2d(points)
    if values is None:
        values = omega(points)
    weights = metric.inverse_products(points, omega.multi_indices)
    return np.sqrt(np.sum(weights * values**2, axis=0))


def _integrand_norms(
    omega: DifferentialForm, metric: DiagonalMetric, grid: Grid
) -> np.ndarray:
    return pointwise_norm(omega, metric, grid.points, omega.values_on(grid))


def lp_norm(
    omega: DifferentialForm,
    metric: DiagonalMetric,
    grid: Grid,
    p: Exponent,
    tail: float = 0.0,
) -> FormNormReport:
    """``(sum w_i dens_i |w|_g^p)^{1/p}`` with an optional analytic tail.

    Args:
        omega: The form
        metric: Metric used for pointwise norms and volume density
        grid: Quadrature grid
        p: Exponent in [1, inf]; inf gives the maximum over nodes
        tail: Bound for the integral of ``|w|^p dvol`` outside the grid,
            only allowed on truncated (infinite) domains
    """
    p = float(p)
    if not p >= 1.0:
        raise FormError(f"Exponent must lie in [1, inf], got {p}")
    if tail < 0:
        raise FormError("Tail bounds are nonnegative")
    if tail and grid.domain.has_finite_volume and grid.domain.kind != "interval":
        raise GeometryError("Tail corrections apply to truncated domains only")
    pointwise = _integrand_norms(omega, metric, grid)
    if math.isinf(p):
        value = float(np.max(pointwise)) if pointwise.size else 0.0
        return FormNormReport(p, value, 0.0, tuple(grid.shape))
    density = metric.volume_density(grid.points)
    mass = float(np.sum(grid.weights * density * pointwise**p))
    value = mass ** (1.0 / p)
    correction = (mass + tail) ** (1.0 / p) - value if tail else 0.0
    return FormNormReport(p, value, correction, tuple(grid.shape))


def inner_product(
    alpha: DifferentialForm,
    beta: DifferentialForm,
    metric: DiagonalMetric,
    grid: Grid,
) -> float:
    """``int <alpha, beta>_g dvol`` by quadrature."""
    if alpha.degree != beta.degree:
        raise FormError("Inner products need equal degrees")
    weights = metric.inverse_products(grid.points, alpha.multi_indices)
    density = metric.volume_density(grid.points)
    integrand = np.sum(weights * alpha.values_on(grid) * beta.values_on(grid), axis=0)
    return float(np.sum(grid.weights * density * integrand))


def top_coefficient(
    alpha: DifferentialForm, gamma: DifferentialForm, points
) -> np.ndarray:
    """Coefficient of ``alpha ^ gamma`` on ``dx^1 ^ ... ^ dx^n`` at points."""
    va, vg = alpha(points), gamma(points)
    out = np.zeros(va.shape[1])
    for a, index_a in enumerate(alpha.multi_indices):
        for g, index_g in enumerate(gamma.multi_indices):
            sign = merge_sign(index_a, index_g)
            if sign:
                out += sign * va[a] * vg[g]
    return out


def pairing_integral(
    alpha: DifferentialForm, gamma: DifferentialForm, grid: Grid
) -> float:
    """``int alpha ^ gamma`` over the chart with the coordinate orientation.

    Raises:
        FormError: When the degrees are not complementary.
    """
    if alpha.domain != gamma.domain:
        raise FormError("Paired forms live on different domains")
    if alpha.degree + gamma.degree != alpha.dim:
        raise FormError(
            "Pairing needs complementary degrees, "
            f"got {alpha.degree} and {gamma.degree}"
        )
    integrand = top_coefficient(alpha, gamma, grid.points)
    return float(np.sum(grid.weights * integrand))
