"""Diagonal Riemannian metrics and conformal rescaling."""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from lqplab.errors import GeometryError

logger = logging.getLogger(__name__)

# A coefficient maps an (M, n) array of points to M positive values.
Coefficient = Callable[[np.ndarray], np.ndarray]


def _constant(value: float) -> Coefficient:
    def coefficient(points: np.ndarray) -> np.ndarray:
        return np.full(np.atleast_2d(points).shape[0], value, dtype=float)

    return coefficient


def _exp_axis(axis: int, factor: float) -> Coefficient:
    def coefficient(points: np.ndarray) -> np.ndarray:
        return np.exp(factor * np.atleast_2d(points)[:, axis])

    return coefficient


@dataclass(frozen=True)
class DiagonalMetric:
    """Metric ``g = sum_i g_ii(x) dx_i^2`` given by its diagonal coefficients."""

    coefficients: Tuple[Coefficient, ...]
    name: str = "custom"

    @property
    def dim(self) -> int:
        return len(self.coefficients)

    @classmethod
    def euclidean(cls, n: int) -> "DiagonalMetric":
        return cls(tuple(_constant(1.0) for _ in range(n)), "euclidean")

    @classmethod
    def horocyclic(cls) -> "DiagonalMetric":
        """``e^{2z} dy^2 + dz^2`` on the (y, z) half-plane chart."""
        return cls((_exp_axis(1, 2.0), _constant(1.0)), "horocyclic")

    def diagonal(self, points: np.ndarray) -> np.ndarray:
        """Coefficients ``g_ii`` at the points, shape (n, M)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.dim:
            raise GeometryError(
                f"Metric of dimension {self.dim} evaluated on {pts.shape[1]}-d points"
            )
        return np.stack([np.asarray(c(pts), dtype=float) for c in self.coefficients])

    def volume_density(self, points: np.ndarray) -> np.ndarray:
        """``sqrt(prod_i g_ii)`` at the points."""
        return np.sqrt(np.prod(self.diagonal(points), axis=0))

    def check_positive(self, points: np.ndarray) -> None:
        g = self.diagonal(points)
        if not np.all(g > 0):
            bad = int(np.sum(np.any(g <= 0, axis=0)))
            raise GeometryError(f"Metric coefficients not positive at {bad} nodes")

    def inverse_products(
        self, points: np.ndarray, multi_indices: Sequence[Tuple[int, ...]]
    ) -> np.ndarray:
        """``prod_{i in I} 1/g_ii`` for each multi-index I, shape (C, M).

        With a diagonal metric the basis forms ``dx^I`` are orthogonal and
        ``|dx^I|^2`` is exactly this product.
        """
        inv = 1.0 / self.diagonal(points)
        m = inv.shape[1]
        rows = []
        for index in multi_indices:
            row = np.ones(m)
            for i in index:
                row = row * inv[i]
            rows.append(row)
        return np.array(rows).reshape(len(multi_indices), m)


def conformal_rescale(
    metric: DiagonalMetric,
    rho: Callable[[np.ndarray], np.ndarray],
    nodes: Optional[np.ndarray] = None,
) -> DiagonalMetric:
    """Return the conformally related metric ``rho^2 g``.

    Args:
        metric: The metric g
        rho: Positive conformal factor evaluated on (M, n) point arrays
        nodes: Optional points where positivity of rho is checked eagerly

    Returns:
        A metric whose coefficients are ``rho^2 g_ii``; evaluating it where
        rho is not positive raises GeometryError.
    """
    if nodes is not None:
        values = np.asarray(rho(np.atleast_2d(nodes)), dtype=float)
        if not np.all(values > 0):
            raise GeometryError("Conformal factor must be positive at every node")

    def scaled(c: Coefficient) -> Coefficient:
        def coefficient(points: np.ndarray) -> np.ndarray:
            r = np.asarray(rho(points), dtype=float)
            if not np.all(r > 0):
                raise GeometryError("Conformal factor must be positive at every node")
            return r**2 * np.asarray(c(points), dtype=float)

        return coefficient

    logger.debug("Conformally rescaling %s metric", metric.name)
    return DiagonalMetric(
        tuple(scaled(c) for c in metric.coefficients), f"conformal({metric.name})"
    )
