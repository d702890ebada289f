"""Cone and averaged homotopy operators, Poincare primitives and the Riesz bound."""

from lqplab.homotopy.cone import (
    DEFAULT_RADIAL_ORDER,
    HomotopyConfig,
    PrimitiveReport,
    averaged_homotopy,
    cone_homotopy,
    homotopy_residual,
    mollified_base,
    poincare_primitive,
    random_polynomial_form,
    symmetric_base,
)
from lqplab.homotopy.riesz import BoundStatus, RieszBound, riesz_bound, sphere_area

__all__ = [
    "DEFAULT_RADIAL_ORDER",
    "HomotopyConfig",
    "PrimitiveReport",
    "averaged_homotopy",
    "cone_homotopy",
    "homotopy_residual",
    "mollified_base",
    "poincare_primitive",
    "random_polynomial_form",
    "symmetric_base",
    "BoundStatus",
    "RieszBound",
    "riesz_bound",
    "sphere_area",
]
