"""Assemble the cochain complex of a periodic grid from the forms stencils."""

import logging
from typing import Optional

import numpy as np

from lqplab.complex.cochain import FiniteCochainComplex
from lqplab.errors import ComplexError
from lqplab.forms.form import staggered_points
from lqplab.forms.multiindex import multi_indices
from lqplab.forms.stencils import exterior_derivative_matrix
from lqplab.geometry.domain import ChartDomain
from lqplab.geometry.grid import Grid
from lqplab.geometry.metric import DiagonalMetric

logger = logging.getLogger(__name__)


def level_weights(grid: Grid, metric: DiagonalMetric, k: int) -> np.ndarray:
    """Cell volume times volume density at each staggered coefficient node."""
    n = grid.dim
    weights = []
    for index in multi_indices(n, k):
        points = staggered_points(grid, index)
        weights.append(grid.weights * metric.volume_density(points))
    return np.concatenate(weights)


def discretize(
    domain: ChartDomain,
    metric: DiagonalMetric,
    grid: Grid,
    up_to_degree: Optional[int] = None,
    stencil: str = "forward",
) -> FiniteCochainComplex:
    """Cochain complex of k-form coefficient vectors on a compact grid.

    Args:
        domain: Circle or torus
        metric: Metric supplying the volume density of the weights
        grid: Tensor grid built on ``domain``
        up_to_degree: Highest degree kept (default: the dimension)
        stencil: Difference stencil; ``forward`` gives the cubical complex

    Returns:
        The complex with ``D_k`` the sparse stencil matrices made dense.

    Raises:
        ComplexError: On non-compact domains or a mismatched grid.
    """
    if domain.kind not in ("circle", "torus"):
        raise ComplexError(
            f"Discretization needs a closed domain, got {domain.kind}"
        )
    if grid.domain != domain:
        raise ComplexError("Grid was built on a different domain")
    n = domain.dim
    top = n if up_to_degree is None else int(up_to_degree)
    if not 1 <= top <= n:
        raise ComplexError(f"Top degree must lie in 1..{n}, got {top}")
    matrices = [
        exterior_derivative_matrix(grid, k, stencil).toarray() for k in range(top)
    ]
    weights = [level_weights(grid, metric, k) for k in range(top + 1)]
    logger.debug(
        "Discretized %s at shape %s: level dims %s",
        domain.kind,
        grid.shape,
        [w.size for w in weights],
    )
    return FiniteCochainComplex.from_matrices(matrices, weights)
