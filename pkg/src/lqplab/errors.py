"""
Exception hierarchy for lqplab.

Every error raised by the library derives from :class:`LqpLabError`. The four
direct families map onto the exit codes of the command-line driver:
configuration and precondition problems (2), failed checks (1) and numerical
non-convergence (3).
"""

from typing import Any, Optional, Sequence, Tuple


class LqpLabError(Exception):
    """Base exception for lqplab errors"""

    pass


class ConfigError(LqpLabError):
    """Experiment configuration could not be loaded or validated"""

    pass


class PreconditionError(LqpLabError):
    """An operation was called outside its domain of definition"""

    pass


class CheckFailure(LqpLabError):
    """A verification check did not hold"""

    pass


class NonConvergenceError(LqpLabError):
    """An iterative numerical method did not converge"""

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class GeometryError(PreconditionError):
    """Invalid domain, metric or grid"""

    pass


class FormError(PreconditionError):
    """Invalid differential-form operation (degrees, domains, representations)"""

    pass


class SingularJacobianError(FormError):
    """A chart map has a singular Jacobian at some evaluation points"""

    def __init__(self, message: str, nodes: Sequence[int] = ()):
        super().__init__(message)
        self.nodes = tuple(nodes)


class ComplexError(PreconditionError):
    """Invalid finite cochain complex"""

    pass


class ExponentViolation(PreconditionError):
    """Exponents violate the Sobolev condition 1/p - 1/q <= 1/n"""

    pass


class InadmissibleExponents(PreconditionError):
    """Exponents outside the range where the homotopy operator is bounded"""

    pass


class EmptyMuInterval(PreconditionError):
    """No admissible exponent mu exists for the ball witness"""

    def __init__(self, message: str, interval: Tuple[float, float]):
        super().__init__(message)
        self.interval = interval


class IncompatibleSource(PreconditionError):
    """The source term of a p-Laplace problem pairs nontrivially with closed forms"""

    def __init__(self, message: str, defect: Any = None):
        super().__init__(message)
        self.defect = defect


class RootFindingError(NonConvergenceError):
    """Bracketed scalar root finding failed"""

    def __init__(self, message: str, bracket: Tuple[float, float]):
        super().__init__(message)
        self.bracket = bracket


__all__ = [
    "LqpLabError",
    "ConfigError",
    "PreconditionError",
    "CheckFailure",
    "NonConvergenceError",
    "GeometryError",
    "FormError",
    "SingularJacobianError",
    "ComplexError",
    "ExponentViolation",
    "InadmissibleExponents",
    "EmptyMuInterval",
    "IncompatibleSource",
    "RootFindingError",
]
