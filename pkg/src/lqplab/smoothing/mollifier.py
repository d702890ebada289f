"""Discrete mollifiers: bump-weighted tensor Gauss rules on the ball of radius eps."""

import logging
from dataclasses import dataclass

import numpy as np

from lqplab.errors import GeometryError
from lqplab.geometry.grid import gauss_legendre
from lqplab.profiles import bump

logger = logging.getLogger(__name__)

DEFAULT_NODES_PER_AXIS = 21


@dataclass(frozen=True, eq=False)
class MollifierSpec:
    """Shifts v and weights approximating ``rho_eps(v) dv``.

    ``rho`` is the normalized bump ``exp(-1/(1 - |u|^2))`` on the unit ball
    and ``rho_eps(v) = eps^{-n} rho(v / eps)``. Nodes with zero weight are
    dropped; the remaining weights are positive and sum to one.
    """

    epsilon: float
    shifts: np.ndarray
    weights: np.ndarray
    nodes_per_axis: int

    @classmethod
    def build(
        cls, n: int, epsilon: float, nodes_per_axis: int = DEFAULT_NODES_PER_AXIS
    ) -> "MollifierSpec":
        if epsilon <= 0:
            raise GeometryError("Mollifier scale must be positive")
        if nodes_per_axis < 2:
            raise GeometryError("Mollifier needs at least two nodes per axis")
        u, w = gauss_legendre(nodes_per_axis, -1.0, 1.0)
        mesh = np.meshgrid(*([u] * n), indexing="ij")
        points = np.stack([m.ravel() for m in mesh], 1)
        wmesh = np.meshgrid(*([w] * n), indexing="ij")
        weights = np.prod(np.stack([m.ravel() for m in wmesh]), axis=0)
        weights = weights * bump(np.linalg.norm(points, axis=1))
        keep = weights > 0
        weights = weights[keep] / np.sum(weights[keep])
        shifts = epsilon * points[keep]
        shifts.flags.writeable = False
        weights.flags.writeable = False
        logger.debug(
            "Mollifier eps=%g with %d nodes in dimension %d", epsilon, len(weights), n
        )
        return cls(float(epsilon), shifts, weights, nodes_per_axis)

    @property
    def dim(self) -> int:
        return self.shifts.shape[1]

    @property
    def size(self) -> int:
        return self.weights.size
