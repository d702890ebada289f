"""Model domains, diagonal metrics, quadrature grids and exponent bookkeeping."""

from lqplab.geometry.domain import ChartDomain
from lqplab.geometry.exponents import (
    ExponentPair,
    ExponentVerdict,
    SobolevCheck,
    reciprocal,
    sobolev_exponent_check,
)
from lqplab.geometry.grid import Grid, build_grid, gauss_legendre, volume
from lqplab.geometry.metric import DiagonalMetric, conformal_rescale

__all__ = [
    "ChartDomain",
    "DiagonalMetric",
    "ExponentPair",
    "ExponentVerdict",
    "Grid",
    "SobolevCheck",
    "build_grid",
    "conformal_rescale",
    "gauss_legendre",
    "reciprocal",
    "sobolev_exponent_check",
    "volume",
]
