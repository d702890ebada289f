"""Best-constant estimates, solvability of d eta = omega and Hoelder monotonicity."""

from lqplab.sobolev.estimates import (
    HolderEntry,
    MonotonicityCheck,
    ObstructionReport,
    SobolevEstimate,
    SolvabilityReport,
    closed_distance,
    estimate_constant,
    monotonicity_check,
    resolution_ladder,
    verify_solvability,
)
from lqplab.sobolev.families import TrigFamily, family_from_spec

__all__ = [
    "HolderEntry",
    "MonotonicityCheck",
    "ObstructionReport",
    "SobolevEstimate",
    "SolvabilityReport",
    "TrigFamily",
    "closed_distance",
    "estimate_constant",
    "family_from_spec",
    "monotonicity_check",
    "resolution_ladder",
    "verify_solvability",
]
