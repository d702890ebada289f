"""Exponent pairs (p, q) and the Sobolev condition ``1/p - 1/q <= 1/n``.

Exponents are stored through their reciprocals as exact fractions so that
boundary cases such as ``1/p - 1/q = 1/n`` are decided without rounding.
"""

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from lqplab.errors import PreconditionError

ExponentLike = Union[int, float, str, Fraction]

_MAX_DENOMINATOR = 10**6


def reciprocal(value: ExponentLike) -> Fraction:
    """Exact reciprocal of an exponent given as number, fraction or string.

    Strings may be ``"inf"``, ``"4/3"`` or decimals.
    """
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "oo", "∞"):
            return Fraction(0)
        value = Fraction(text)
    if isinstance(value, float):
        if math.isinf(value) and value > 0:
            return Fraction(0)
        if not math.isfinite(value):
            raise PreconditionError(f"Invalid exponent {value}")
        value = Fraction(value).limit_denominator(_MAX_DENOMINATOR)
    value = Fraction(value)
    if value <= 0:
        raise PreconditionError(f"Exponent must be positive, got {value}")
    return 1 / value


def _from_reciprocal(inv: Fraction) -> float:
    return math.inf if inv == 0 else float(1 / inv)


@dataclass(frozen=True)
class ExponentPair:
    """Exponents p, q in [1, inf] with conjugates and the Young exponent s."""

    inv_p: Fraction
    inv_q: Fraction

    def __post_init__(self):
        for name, inv in (("p", self.inv_p), ("q", self.inv_q)):
            if not 0 <= inv <= 1:
                raise PreconditionError(f"{name} must lie in [1, inf]")

    @classmethod
    def of(cls, p: ExponentLike, q: ExponentLike) -> "ExponentPair":
        return cls(reciprocal(p), reciprocal(q))

    @property
    def p(self) -> float:
        return _from_reciprocal(self.inv_p)

    @property
    def q(self) -> float:
        return _from_reciprocal(self.inv_q)

    @property
    def inv_p_conjugate(self) -> Fraction:
        return 1 - self.inv_p

    @property
    def inv_q_conjugate(self) -> Fraction:
        return 1 - self.inv_q

    @property
    def p_conjugate(self) -> float:
        return _from_reciprocal(self.inv_p_conjugate)

    @property
    def q_conjugate(self) -> float:
        return _from_reciprocal(self.inv_q_conjugate)

    @property
    def inv_s(self) -> Optional[Fraction]:
        """``1/s = 1 + 1/q - 1/p`` when positive, else None."""
        value = 1 + self.inv_q - self.inv_p
        return value if value > 0 else None

    @property
    def s(self) -> Optional[float]:
        inv = self.inv_s
        return None if inv is None else float(1 / inv)

    @property
    def endpoint(self) -> bool:
        """True when p or q equals 1 or infinity."""
        return any(inv in (0, 1) for inv in (self.inv_p, self.inv_q))

    def __str__(self) -> str:
        return f"(p={_format(self.inv_p)}, q={_format(self.inv_q)})"


def _format(inv: Fraction) -> str:
    if inv == 0:
        return "inf"
    return str(1 / inv)


class ExponentVerdict(str, Enum):
    STRICT = "strict"
    BOUNDARY = "boundary"
    VIOLATED = "violated"


@dataclass(frozen=True)
class SobolevCheck:
    """Outcome of :func:`sobolev_exponent_check`."""

    verdict: ExponentVerdict
    gap: Fraction
    branch: str
    critical_exponent: float
    endpoint: bool

    @property
    def admissible(self) -> bool:
        return self.verdict is not ExponentVerdict.VIOLATED


def sobolev_exponent_check(pair: ExponentPair, n: int) -> SobolevCheck:
    """Classify ``1/p - 1/q`` against ``1/n``.

    ``gap`` is ``1/p - 1/q - 1/n``. The branch names the equivalent form of
    the condition: ``p >= n``, or ``p < n`` together with ``q`` compared to
    the critical exponent ``np/(n - p)``.
    """
    if n < 1:
        raise PreconditionError("Dimension must be at least 1")
    inv_n = Fraction(1, n)
    gap = pair.inv_p - pair.inv_q - inv_n
    if gap < 0:
        verdict = ExponentVerdict.STRICT
    elif gap == 0:
        verdict = ExponentVerdict.BOUNDARY
    else:
        verdict = ExponentVerdict.VIOLATED
    if pair.inv_p <= inv_n:
        branch = "p >= n"
        critical = math.inf
    else:
        inv_critical = pair.inv_p - inv_n
        critical = float(1 / inv_critical)
        relation = "<=" if pair.inv_q >= inv_critical else ">"
        branch = f"p < n and q {relation} np/(n-p)"
    return SobolevCheck(verdict, gap, branch, critical, pair.endpoint)
