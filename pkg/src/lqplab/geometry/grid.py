"""Quadrature grids on model domains."""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial.legendre import leggauss

from lqplab.errors import GeometryError
from lqplab.geometry.domain import ChartDomain
from lqplab.geometry.metric import DiagonalMetric

logger = logging.getLogger(__name__)

MIN_RESOLUTION = 4


@dataclass(frozen=True, eq=False)
class Grid:
    """Quadrature nodes and weights on a chart domain.

    ``points`` are Cartesian coordinates of shape (M, n) in C order over
    ``shape``; ``weights`` integrate against the coordinate (Lebesgue)
    measure. Tensor grids (``coordinates == "cartesian"``) also expose their
    per-axis nodes and uniform spacings for finite differences. Ball grids
    use polar (n=2) or spherical (n=3) product coordinates; their radial
    nodes are ``r = s**grading`` with Gauss-Legendre nodes ``s``.
    """

    domain: ChartDomain
    axes: Tuple[np.ndarray, ...]
    points: np.ndarray
    weights: np.ndarray
    shape: Tuple[int, ...]
    coordinates: str = "cartesian"
    grading: Optional[float] = None
    radii: Optional[np.ndarray] = None

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def is_tensor(self) -> bool:
        return self.coordinates == "cartesian"

    @property
    def spacing(self) -> Tuple[float, ...]:
        if not self.is_tensor:
            raise GeometryError("Only Cartesian tensor grids have uniform spacing")
        out = []
        for axis, nodes in enumerate(self.axes):
            if self.domain.periodic[axis]:
                out.append(self.domain.lengths[axis] / len(nodes))
            else:
                out.append(float(nodes[1] - nodes[0]))
        return tuple(out)

    @property
    def measure(self) -> float:
        return float(np.sum(self.weights))


def trapezoid_weights(n_nodes: int, h: float) -> np.ndarray:
    """Composite trapezoid weights with fourth-order end corrections.

    Falls back to the plain trapezoid rule below six nodes.
    """
    w = np.full(n_nodes, h)
    if n_nodes >= 6:
        ends = h * np.array([3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0])
        w[:3] = ends
        w[-3:] = ends[::-1]
    else:
        w[0] = w[-1] = h / 2.0
    return w


def gauss_legendre(order: int, a: float = 0.0, b: float = 1.0):
    """Gauss-Legendre nodes and weights mapped to ``[a, b]``."""
    x, w = leggauss(order)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def _readonly(*arrays: np.ndarray) -> None:
    for a in arrays:
        a.flags.writeable = False


def _resolution(resolution: Union[int, Sequence[int]], count: int) -> Tuple[int, ...]:
    if isinstance(resolution, (int, np.integer)):
        res = (int(resolution),) * count
    else:
        res = tuple(int(r) for r in resolution)
    if len(res) != count:
        raise GeometryError(f"Expected {count} resolution entries, got {len(res)}")
    if min(res) < MIN_RESOLUTION:
        raise GeometryError(f"Resolution must be at least {MIN_RESOLUTION} per axis")
    return res


def _tensor_grid(domain: ChartDomain, res: Tuple[int, ...]) -> Grid:
    axes, axis_weights = [], []
    for (lo, hi), periodic, n_nodes in zip(domain.bounds, domain.periodic, res):
        if periodic:
            h = (hi - lo) / n_nodes
            axes.append(lo + h * np.arange(n_nodes))
            axis_weights.append(np.full(n_nodes, h))
        else:
            h = (hi - lo) / (n_nodes - 1)
            axes.append(np.linspace(lo, hi, n_nodes))
            axis_weights.append(trapezoid_weights(n_nodes, h))
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    wmesh = np.meshgrid(*axis_weights, indexing="ij")
    weights = np.prod(np.stack([m.ravel() for m in wmesh]), axis=0)
    for a in axes:
        _readonly(a)
    _readonly(points, weights)
    return Grid(domain, tuple(axes), points, weights, res)


def _ball_grid(domain: ChartDomain, res: Tuple[int, ...], grading: float) -> Grid:
    n = domain.dim
    radius = domain.radius
    s, ws = gauss_legendre(res[0])
    r = radius * s**grading
    wr = ws * grading * s ** (grading - 1.0) * radius * r ** (n - 1)
    if n == 2:
        psi = 2.0 * math.pi * np.arange(res[1]) / res[1]
        wpsi = np.full(res[1], 2.0 * math.pi / res[1])
        rr, pp = np.meshgrid(r, psi, indexing="ij")
        points = np.stack([(rr * np.cos(pp)).ravel(), (rr * np.sin(pp)).ravel()], 1)
        weights = np.outer(wr, wpsi).ravel()
        axes: Tuple[np.ndarray, ...] = (r, psi)
        coordinates = "polar"
    elif n == 3:
        cos_t, wt = gauss_legendre(res[1], -1.0, 1.0)
        theta = np.arccos(cos_t)
        phi = 2.0 * math.pi * np.arange(res[2]) / res[2]
        wphi = np.full(res[2], 2.0 * math.pi / res[2])
        rr, tt, pp = np.meshgrid(r, theta, phi, indexing="ij")
        points = np.stack(
            [
                (rr * np.sin(tt) * np.cos(pp)).ravel(),
                (rr * np.sin(tt) * np.sin(pp)).ravel(),
                (rr * np.cos(tt)).ravel(),
            ],
            1,
        )
        weights = (wr[:, None, None] * wt[None, :, None] * wphi[None, None, :]).ravel()
        axes = (r, theta, phi)
        coordinates = "spherical"
    else:
        raise GeometryError("Ball grids are available in dimensions 2 and 3")
    radii = np.repeat(r, int(np.prod(res[1:])))
    for a in axes:
        _readonly(a)
    _readonly(points, weights, radii)
    return Grid(domain, axes, points, weights, res, coordinates, grading, radii)


def build_grid(
    domain: ChartDomain,
    resolution: Union[int, Sequence[int]],
    grading: Optional[float] = None,
) -> Grid:
    """Build a quadrature grid on ``domain``.

    Args:
        domain: The chart domain
        resolution: Node count per axis (radial first for balls)
        grading: Radial grading exponent, balls only (default 2 there)

    Returns:
        The grid; periodic axes carry no duplicated endpoint node.

    Raises:
        GeometryError: On resolutions below 4 or grading on a domain
            without a singular point.
    """
    if domain.kind == "ball" and domain.dim >= 2:
        res = _resolution(resolution, domain.dim)
        g = 2.0 if grading is None else float(grading)
        if g < 1.0:
            raise GeometryError("Radial grading exponent must be >= 1")
        grid = _ball_grid(domain, res, g)
    else:
        if grading is not None:
            raise GeometryError(
                f"Grading requires a singular point; {domain.kind} has none"
            )
        res = _resolution(resolution, domain.dim)
        grid = _tensor_grid(domain, res)
    logger.debug(
        "Built %s grid on %s with shape %s", grid.coordinates, domain.kind, grid.shape
    )
    return grid


def volume(domain: ChartDomain, metric: DiagonalMetric, grid: Grid) -> float:
    """Quadrature of the Riemannian volume density over the grid."""
    if grid.domain != domain:
        raise GeometryError("Grid was built on a different domain")
    return float(np.sum(grid.weights * metric.volume_density(grid.points)))
