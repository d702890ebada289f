"""Finite cochain complexes, their cohomology and best constants."""

from lqplab.complex.cochain import (
    FiniteCochainComplex,
    TorsionReport,
    cohomology_dimension,
    numerical_rank,
    random_complex,
    torsion_check,
)
from lqplab.complex.constants import (
    ConstantReport,
    MonotonicityReport,
    certificate_ratio,
    corrector_constant,
    image_constant,
    quotient_monotonicity,
    shift_minimum,
    solvability_constant,
    weighted_norm,
)
from lqplab.complex.discretize import discretize, level_weights
from lqplab.complex.io import dumps_complex, load_complex, loads_complex, save_complex

__all__ = [
    "FiniteCochainComplex",
    "TorsionReport",
    "cohomology_dimension",
    "numerical_rank",
    "random_complex",
    "torsion_check",
    "ConstantReport",
    "MonotonicityReport",
    "certificate_ratio",
    "corrector_constant",
    "image_constant",
    "quotient_monotonicity",
    "shift_minimum",
    "solvability_constant",
    "weighted_norm",
    "discretize",
    "level_weights",
    "dumps_complex",
    "load_complex",
    "loads_complex",
    "save_complex",
]
