"""Exterior derivative, wedge product, Hodge star, codifferential."""

import logging
from typing import Optional

import numpy as np

from lqplab.errors import FormError
from lqplab.forms.form import (
    DifferentialForm,
    Representation,
    sampled_form,
)
from lqplab.forms.multiindex import (
    complement,
    contraction_terms,
    derivative_terms,
    index_map,
    merge_sign,
    multi_indices,
)
from lqplab.forms.stencils import difference
from lqplab.geometry import DiagonalMetric

logger = logging.getLogger(__name__)

DEFAULT_PROBE_STEP = 1e-3


def _assemble(n: int, k: int, partials) -> np.ndarray:
    """Combine per-axis partial derivatives into the coefficients of d."""
    first = partials[0]
    out = np.zeros((len(multi_indices(n, k + 1)),) + first.shape[1:])
    for target, source, axis, sign in derivative_terms(n, k):
        out[target] += sign * partials[axis][source]
    return out


def probe_partials(
    form: DifferentialForm, points: np.ndarray, step: float = DEFAULT_PROBE_STEP
):
    """Fourth-order central-difference partials of a form at points.

    Returns a list over axes of (C, M) arrays.
    """
    partials = []
    for axis in range(form.dim):
        e = np.zeros(form.dim)
        e[axis] = step
        partials.append(
            (
                -form(points + 2 * e)
                + 8.0 * form(points + e)
                - 8.0 * form(points - e)
                + form(points - 2 * e)
            )
            / (12.0 * step)
        )
    return partials


def exterior_derivative(
    omega: DifferentialForm,
    stencil: str = "central4",
    step: float = DEFAULT_PROBE_STEP,
) -> DifferentialForm:
    """Exterior derivative of a k-form.

    Analytic forms return their attached exact differential. Sampled forms
    are differentiated on their grid with ``stencil``. Everything else is
    differentiated pointwise by a fourth-order central probe of width
    ``step``.

    Raises:
        FormError: For top-degree forms.
    """
    n, k = omega.dim, omega.degree
    if k >= n:
        raise FormError(f"d is not defined on {k}-forms in dimension {n}")
    if omega.differential is not None:
        return omega.differential
    if omega.representation is Representation.SAMPLED:
        grid = omega.grid
        assert grid is not None and omega.values is not None
        spacing = grid.spacing
        partials = [
            difference(
                omega.values,
                1 + axis,
                spacing[axis],
                grid.domain.periodic[axis],
                stencil,
            )
            for axis in range(n)
        ]
        return sampled_form(k + 1, grid, _assemble(n, k, partials), omega.order)

    def evaluator(points: np.ndarray) -> np.ndarray:
        return _assemble(n, k, probe_partials(omega, points, step))

    return DifferentialForm(k + 1, omega.domain, evaluator, Representation.LAZY)


def interior_product_values(vector: np.ndarray, values: np.ndarray, n: int, k: int):
    """Contract (C_k, M) coefficients with a (n, M) vector field."""
    out = np.zeros((len(multi_indices(n, k - 1)), values.shape[1]))
    for target, source, axis, sign in contraction_terms(n, k):
        out[target] += sign * vector[axis] * values[source]
    return out


def wedge(alpha: DifferentialForm, beta: DifferentialForm) -> DifferentialForm:
    """Exterior product ``alpha ^ beta``.

    When both factors carry exact differentials the Leibniz rule
    ``d(a ^ b) = da ^ b + (-1)^k a ^ db`` is attached.
    """
    if alpha.domain != beta.domain:
        raise FormError("Wedge factors live on different domains")
    n, k, l = alpha.dim, alpha.degree, beta.degree
    if k + l > n:
        raise FormError(f"Degree overflow: {k} + {l} > {n}")
    target_map = index_map(n, k + l)
    terms = []
    for a, index_a in enumerate(alpha.multi_indices):
        for b, index_b in enumerate(beta.multi_indices):
            sign = merge_sign(index_a, index_b)
            if sign:
                terms.append((target_map[tuple(sorted(index_a + index_b))], a, b, sign))
    n_out = len(multi_indices(n, k + l))

    def combine(va: np.ndarray, vb: np.ndarray) -> np.ndarray:
        out = np.zeros((n_out,) + va.shape[1:])
        for t, a, b, sign in terms:
            out[t] += sign * va[a] * vb[b]
        return out

    both_sampled = (
        alpha.representation is Representation.SAMPLED
        and beta.representation is Representation.SAMPLED
        and alpha.grid is beta.grid
    )
    if both_sampled:
        return sampled_form(k + l, alpha.grid, combine(alpha.values, beta.values))

    differential: Optional[DifferentialForm] = None
    if (
        k + l < n
        and alpha.differential is not None
        and beta.differential is not None
    ):
        first = wedge(alpha.differential, beta) if k + 1 + l <= n else None
        second = wedge(alpha, beta.differential) if k + l + 1 <= n else None
        if first is not None and second is not None:
            differential = first + ((-1) ** k) * second

    def evaluator(points: np.ndarray) -> np.ndarray:
        return combine(alpha(points), beta(points))

    analytic = (
        alpha.representation is Representation.ANALYTIC
        and beta.representation is Representation.ANALYTIC
    )
    return DifferentialForm(
        k + l,
        alpha.domain,
        evaluator,
        Representation.ANALYTIC if analytic else Representation.LAZY,
        differential,
    )


def _star_factors(metric: DiagonalMetric, points: np.ndarray, n: int, k: int):
    """Per-component ``(target, sign * sqrt(prod g_Ic / prod g_I))``."""
    g = metric.diagonal(points)
    sqrt_g = np.sqrt(g)
    target_map = index_map(n, n - k)
    factors = []
    for index in multi_indices(n, k):
        rest = complement(n, index)
        sign = merge_sign(index, rest)
        scale = np.ones(points.shape[0])
        for i in index:
            scale = scale / sqrt_g[i]
        for i in rest:
            scale = scale * sqrt_g[i]
        factors.append((target_map[rest], sign * scale))
    return factors


def hodge_star(omega: DifferentialForm, metric: DiagonalMetric) -> DifferentialForm:
    """Hodge star determined by ``a ^ *b = <a, b>_g dvol``.

    For a diagonal metric ``*dx^I = sign(I, I^c) prod_{I^c} sqrt(g_ii) /
    prod_I sqrt(g_ii) dx^{I^c}``.
    """
    n, k = omega.dim, omega.degree
    if metric.dim != n:
        raise FormError("Metric and form dimensions differ")

    def apply(values: np.ndarray, points: np.ndarray) -> np.ndarray:
        out = np.zeros_like(values)
        for source, (target, factor) in enumerate(_star_factors(metric, points, n, k)):
            out[target] = factor * values[source]
        return out

    if omega.representation is Representation.SAMPLED:
        grid = omega.grid
        assert grid is not None
        values = apply(omega.values_on(grid), grid.points)
        return sampled_form(n - k, grid, values, omega.order)

    def evaluator(points: np.ndarray) -> np.ndarray:
        return apply(omega(points), points)

    return DifferentialForm(n - k, omega.domain, evaluator, Representation.LAZY)


def codifferential(
    omega: DifferentialForm,
    metric: DiagonalMetric,
    stencil: str = "central4",
    step: float = DEFAULT_PROBE_STEP,
) -> DifferentialForm:
    """``delta = (-1)^{nk+n+1} * d *`` on k-forms, k >= 1."""
    n, k = omega.dim, omega.degree
    if k == 0:
        raise FormError("The codifferential of a 0-form is not defined")
    sign = -1.0 if (n * k + n + 1) % 2 else 1.0
    inner = exterior_derivative(hodge_star(omega, metric), stencil, step)
    return sign * hodge_star(inner, metric)
