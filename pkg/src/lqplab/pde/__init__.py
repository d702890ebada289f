from lqplab.pde.problem import (
    COMPATIBILITY_TOLERANCE,
    REGULARIZATION,
    CompatibilityDefect,
    PLaplaceProblem,
    compatibility,
    energy,
    weak_residual,
)
from lqplab.pde.solver import (
    SOLVER_METHODS,
    SolverOptions,
    SolveTrace,
    gradient_check,
    solve,
)

__all__ = [
    "COMPATIBILITY_TOLERANCE",
    "REGULARIZATION",
    "SOLVER_METHODS",
    "CompatibilityDefect",
    "PLaplaceProblem",
    "SolveTrace",
    "SolverOptions",
    "compatibility",
    "energy",
    "gradient_check",
    "solve",
    "weak_residual",
]
