"""Young-inequality bound for the Riesz-type kernel ``|x|^{1-n}``."""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Optional

from lqplab.errors import PreconditionError
from lqplab.geometry.exponents import ExponentLike, ExponentPair

logger = logging.getLogger(__name__)


class BoundStatus(str, Enum):
    ADMISSIBLE = "admissible"
    BOUNDARY = "boundary"
    INADMISSIBLE = "inadmissible"


@dataclass(frozen=True)
class RieszBound:
    """Norm of ``|x|^{1-n}`` in ``L^s`` over a ball.

    ``1/s = 1 + 1/q - 1/p``. The kernel is in ``L^s`` exactly when
    ``s (1 - n) > -n``, i.e. ``1/p - 1/q < 1/n``. On the boundary
    ``1/p - 1/q = 1/n`` boundedness comes from the Hardy-Littlewood-Sobolev
    inequality and no constant is computed.
    """

    n: int
    pair: ExponentPair
    inv_s: Fraction
    diameter: float
    status: BoundStatus
    kernel_norm: Optional[float]
    failing: str = ""

    @property
    def s(self) -> float:
        return float(1 / self.inv_s)

    @property
    def admissible(self) -> bool:
        return self.status is BoundStatus.ADMISSIBLE

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "p": self.pair.p,
            "q": self.pair.q,
            "s": self.s,
            "diameter": self.diameter,
            "status": self.status.value,
            "kernel_norm": self.kernel_norm,
            "failing": self.failing,
        }


def sphere_area(n: int) -> float:
    """Area of the unit sphere ``S^{n-1}``."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def riesz_bound(
    n: int, p: ExponentLike, q: ExponentLike, diameter: float = 2.0
) -> RieszBound:
    """Kernel norm ``|| |x|^{1-n} ||_{L^s(B_R)}`` with ``R = diameter / 2``.

    In polar coordinates the integral is ``|S^{n-1}| R^beta / beta`` with
    ``beta = n + (1 - n) s``.

    Raises:
        PreconditionError: When ``1 + 1/q - 1/p <= 0`` or the diameter is
            not positive.
    """
    if diameter <= 0:
        raise PreconditionError("Diameter must be positive")
    pair = ExponentPair.of(p, q)
    inv_s = 1 + pair.inv_q - pair.inv_p
    if inv_s <= 0:
        raise PreconditionError(f"Young exponent undefined: 1 + 1/q - 1/p = {inv_s}")
    gap = pair.inv_p - pair.inv_q
    critical = Fraction(1, n)
    if gap > critical:
        failing = f"1/p - 1/q = {gap} > 1/n = {critical}"
        logger.debug("Riesz bound inadmissible: %s", failing)
        return RieszBound(
            n, pair, inv_s, diameter, BoundStatus.INADMISSIBLE, None, failing
        )
    if gap == critical:
        return RieszBound(n, pair, inv_s, diameter, BoundStatus.BOUNDARY, None)
    s = float(1 / inv_s)
    beta = n + (1 - n) * s
    radius = diameter / 2.0
    integral = sphere_area(n) * radius**beta / beta
    return RieszBound(
        n, pair, inv_s, diameter, BoundStatus.ADMISSIBLE, integral ** (1.0 / s)
    )
