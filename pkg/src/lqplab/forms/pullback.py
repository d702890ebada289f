"""Chart self-maps and pullback of forms."""

import logging
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from lqplab.errors import FormError, SingularJacobianError
from lqplab.forms.form import DifferentialForm, Representation

logger = logging.getLogger(__name__)

SINGULAR_TOLERANCE = 1e-13


class ChartMap(ABC):
    """A differentiable map of the chart into itself."""

    dim: int

    @abstractmethod
    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Images of (M, n) points."""

    @abstractmethod
    def jacobian(self, points: np.ndarray) -> np.ndarray:
        """Jacobians ``J[m, a, b] = dF_a / dx_b`` of shape (M, n, n)."""


class AffineMap(ChartMap):
    """``F(x) = A x + b``."""

    def __init__(self, matrix: np.ndarray, offset: Optional[np.ndarray] = None):
        self.matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        self.dim = self.matrix.shape[0]
        self.offset = (
            np.zeros(self.dim) if offset is None else np.asarray(offset, dtype=float)
        )

    @classmethod
    def translation(cls, v: np.ndarray) -> "AffineMap":
        v = np.asarray(v, dtype=float)
        return cls(np.eye(v.size), v)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.atleast_2d(points) @ self.matrix.T + self.offset

    def jacobian(self, points: np.ndarray) -> np.ndarray:
        m = np.atleast_2d(points).shape[0]
        return np.broadcast_to(self.matrix, (m, self.dim, self.dim))


class ComposedMap(ChartMap):
    """``outer o inner``."""

    def __init__(self, outer: ChartMap, inner: ChartMap):
        self.outer, self.inner = outer, inner
        self.dim = inner.dim

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.outer(self.inner(points))

    def jacobian(self, points: np.ndarray) -> np.ndarray:
        mid = self.inner(points)
        return np.einsum(
            "mab,mbc->mac", self.outer.jacobian(mid), self.inner.jacobian(points)
        )


def minors(jac: np.ndarray, rows, cols) -> np.ndarray:
    """Determinants ``det J[rows, cols]`` over the leading axis."""
    if len(rows) == 0:
        return np.ones(jac.shape[0])
    sub = jac[:, list(rows)][:, :, list(cols)]
    return np.linalg.det(sub)


def pullback_values(
    omega: DifferentialForm,
    mapping: ChartMap,
    points: np.ndarray,
    check_singular: bool = True,
) -> np.ndarray:
    """Coefficients of ``F^* w`` at the points, shape (C, M).

    ``(F^* w)_I(x) = sum_J w_J(F(x)) det(DF(x)[J, I])``.
    """
    points = np.atleast_2d(points)
    jac = mapping.jacobian(points)
    if check_singular:
        det = np.linalg.det(jac)
        bad = np.flatnonzero(np.abs(det) <= SINGULAR_TOLERANCE)
        if bad.size:
            raise SingularJacobianError(
                f"Singular Jacobian at {bad.size} of {points.shape[0]} nodes", bad
            )
    image = omega(mapping(points))
    indices = omega.multi_indices
    out = np.zeros((len(indices), points.shape[0]))
    for i, index_i in enumerate(indices):
        for j, index_j in enumerate(indices):
            out[i] += image[j] * minors(jac, index_j, index_i)
    return out


def pullback(omega: DifferentialForm, mapping: ChartMap) -> DifferentialForm:
    """Lazy pullback ``F^* w``; singular Jacobians raise on evaluation."""
    if mapping.dim != omega.dim:
        raise FormError("Map and form dimensions differ")

    def evaluator(points: np.ndarray) -> np.ndarray:
        return pullback_values(omega, mapping, points)

    return DifferentialForm(
        omega.degree, omega.domain, evaluator, Representation.LAZY, label=omega.label
    )
