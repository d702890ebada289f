"""Witness reports and the almost-duality verdicts they carry."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence


class Verdict(str, Enum):
    LOWER_BOUND = "lower-bound"
    NONVANISHING = "nonvanishing"
    REDUCED_NONVANISHING = "reduced-nonvanishing"
    VANISHING_EVIDENCE = "vanishing-evidence"
    EXCLUDED = "excluded"
    INCONCLUSIVE = "inconclusive"


@dataclass
class WitnessReport:
    """Outcome of one witness construction.

    Every number is reproducible from ``parameters``; ``checks`` holds the
    named boolean properties that were verified numerically.
    """

    name: str
    parameters: Dict[str, Any]
    verdict: Verdict
    pairings: Dict[str, float] = field(default_factory=dict)
    norms: Dict[str, float] = field(default_factory=dict)
    bound: Optional[float] = None
    ratio: Optional[float] = None
    checks: Dict[str, bool] = field(default_factory=dict)
    tolerances: Dict[str, float] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "parameters": self.parameters,
            "verdict": self.verdict.value,
            "pairings": self.pairings,
            "norms": self.norms,
            "bound": self.bound,
            "ratio": self.ratio,
            "checks": self.checks,
            "tolerances": self.tolerances,
            "notes": self.notes,
        }


def sequence_certificate(
    pairings: Sequence[float],
    differential_norms: Sequence[float],
    lower: float,
) -> Dict[str, bool]:
    """Conditions for a sequence gamma_i to certify ``[alpha] != 0``.

    The pairings ``int alpha ^ gamma_i`` must stay bounded below by ``lower``
    in absolute value and ``||d gamma_i||`` must strictly decrease.
    """
    bounded_below = all(abs(x) >= lower for x in pairings)
    decreasing = all(
        b < a for a, b in zip(differential_norms, differential_norms[1:])
    )
    return {
        "pairing_bounded_below": bounded_below,
        "differential_decreasing": decreasing,
    }


def closed_pairing_certificate(
    pairing: float, gamma_closed: bool, dual_norms: Dict[str, float], tolerance: float
) -> Dict[str, bool]:
    """Conditions for a closed gamma with finite dual norms to certify a
    nonzero reduced class: nonzero pairing, closedness, finite norms."""
    return {
        "pairing_nonzero": abs(pairing) > tolerance,
        "gamma_closed": gamma_closed,
        "dual_norms_finite": all(
            v == v and v != float("inf") for v in dual_norms.values()
        ),
    }
