"""The p-Laplace problem ``delta(|d theta|^{p-2} d theta) = alpha`` on forms.

Unknowns are k-cochains of a circle or torus grid; ``d`` is the forward
coboundary and integrals are the mass-weighted sums of the Hodge system, so

    I(theta) = (1/p) sum_j m_j |(d theta)_j|^p - sum_i m_i alpha_i theta_i.

The magnitude ``|d theta|`` is taken per coefficient node. The source is
discretized by cell averages, which makes the discrete flux balance exact for
smooth sources.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Union

import numpy as np

from lqplab.errors import FormError, PreconditionError
from lqplab.forms.form import DifferentialForm, cell_average_cochain
from lqplab.forms.multiindex import multi_indices
from lqplab.geometry import ChartDomain, DiagonalMetric, ExponentPair, build_grid
from lqplab.geometry.exponents import ExponentLike
from lqplab.hodge.system import DiscreteHodgeSystem, hodge_decompose

logger = logging.getLogger(__name__)

REGULARIZATION = 1e-8
COMPATIBILITY_TOLERANCE = 1e-9

Cochain = Union[np.ndarray, DifferentialForm]


@dataclass
class CompatibilityDefect:
    """Pairings of the source with the discrete closed forms.

    ``pairings`` are ``int <alpha, dx^I> dvol`` against the harmonic
    coordinate forms; ``exact`` is the norm of the vector of pairings with an
    orthonormal basis of the exact forms, i.e. the norm of the exact part of
    alpha.
    """

    pairings: Dict[str, float]
    exact: float
    tolerance: float

    @property
    def vector(self) -> np.ndarray:
        return np.array(list(self.pairings.values()) + [self.exact])

    @property
    def compatible(self) -> bool:
        return bool(np.all(np.abs(self.vector) <= self.tolerance))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pairings": self.pairings,
            "exact": self.exact,
            "tolerance": self.tolerance,
            "compatible": self.compatible,
        }


@dataclass(eq=False)
class PLaplaceProblem:
    """Discrete p-Laplace problem on a circle or torus."""

    system: DiscreteHodgeSystem
    degree: int
    p: float
    q: float
    alpha: np.ndarray
    epsilon: float = REGULARIZATION
    label: str = ""
    defect: CompatibilityDefect = field(init=False)

    def __post_init__(self):
        n = self.system.dim
        if not 0 <= self.degree <= n:
            raise PreconditionError(
                f"No p-Laplacian on {self.degree}-forms in dimension {n}"
            )
        if not 1.0 < self.p < math.inf:
            raise PreconditionError(f"p must lie in (1, inf), got {self.p}")
        self.alpha = np.asarray(self.alpha, dtype=float).ravel()
        if self.alpha.size != self.system.size(self.degree):
            raise FormError("Source cochain has the wrong size for its degree")
        self.defect = compatibility(self.alpha, self)

    @classmethod
    def build(
        cls,
        source: DifferentialForm,
        p: ExponentLike,
        resolution: int = 256,
        q: Optional[ExponentLike] = None,
        metric: Optional[DiagonalMetric] = None,
        epsilon: float = REGULARIZATION,
    ) -> "PLaplaceProblem":
        """Problem with source ``alpha`` given as a form on a circle or torus."""
        domain: ChartDomain = source.domain
        if not domain.is_closed:
            raise PreconditionError("p-Laplace problems are posed on circles and tori")
        pair = ExponentPair.of(p, p if q is None else q)
        grid = build_grid(domain, resolution)
        system = DiscreteHodgeSystem.build(grid, metric)
        alpha = cell_average_cochain(source, grid).ravel()
        return cls(system, source.degree, pair.p, pair.q, alpha, epsilon, source.label)

    @property
    def size(self) -> int:
        return self.system.size(self.degree)

    def cochain(self, theta: Cochain) -> np.ndarray:
        if isinstance(theta, DifferentialForm):
            if theta.degree != self.degree:
                raise FormError(
                    f"Expected a {self.degree}-form, got degree {theta.degree}"
                )
            return self.system.cochain(theta)
        out = np.asarray(theta, dtype=float).ravel()
        if out.size != self.size:
            raise FormError("Cochain has the wrong size for the problem degree")
        return out

    def flux_weights(
        self, d_theta: np.ndarray, epsilon: Optional[float] = None
    ) -> np.ndarray:
        """``(|d theta|^2 + eps^2)^{(p-2)/2}``.

        With eps = 0 the weight is zero where d theta vanishes.
        """
        eps = self.epsilon if epsilon is None else epsilon
        a2 = d_theta * d_theta + eps * eps
        if eps == 0.0:
            out = np.zeros_like(a2)
            positive = a2 > 0
            out[positive] = a2[positive] ** ((self.p - 2.0) / 2.0)
            return out
        return a2 ** ((self.p - 2.0) / 2.0)

    def energy(self, theta: Cochain, epsilon: Optional[float] = None) -> float:
        x = self.cochain(theta)
        eps = self.epsilon if epsilon is None else epsilon
        if self.degree == self.system.dim:
            return -self.system.inner(self.degree, self.alpha, x)
        dx = self.system.apply_d(self.degree, x)
        mass_up = self.system.mass[self.degree + 1]
        stored = float(np.sum(mass_up * (dx * dx + eps**2) ** (self.p / 2.0)))
        stored -= float(np.sum(mass_up)) * eps**self.p
        return stored / self.p - self.system.inner(self.degree, self.alpha, x)

    def energy_gradient(
        self, theta: Cochain, epsilon: Optional[float] = None
    ) -> np.ndarray:
        """Weak gradient ``G(theta)[e_i]`` against the unit cochains.

        ``G(theta)[phi] = int <|d theta|^{p-2} d theta, d phi> - int <alpha, phi>``.
        """
        x = self.cochain(theta)
        k = self.degree
        if k == self.system.dim:
            return -self.system.mass[k] * self.alpha
        dx = self.system.apply_d(k, x)
        flux = self.system.mass[k + 1] * self.flux_weights(dx, epsilon) * dx
        return self.system.d[k].T @ flux - self.system.mass[k] * self.alpha

    def project(self, x: np.ndarray) -> np.ndarray:
        """Mass-orthogonal projection onto the complement of the closed cochains."""
        return hodge_decompose(self.system, self.degree, x).coexact


def energy(theta: Cochain, problem: PLaplaceProblem) -> float:
    """``(1/p) ||d theta||_p^p - int <alpha, theta> dvol``."""
    return problem.energy(theta)


def compatibility(alpha: Cochain, problem: PLaplaceProblem) -> CompatibilityDefect:
    """Pairings of alpha with the discrete closed k-forms."""
    system, k = problem.system, problem.degree
    a = problem.cochain(alpha)
    n, m = system.dim, system.grid.size
    mass = system.mass[k]
    pairings = {}
    for c, index in enumerate(multi_indices(n, k)):
        name = "^".join(f"dx{i + 1}" for i in index) or "1"
        block = slice(c * m, (c + 1) * m)
        pairings[name] = float(np.sum(mass[block] * a[block]))
    exact = system.norm(k, hodge_decompose(system, k, a).exact) if k >= 1 else 0.0
    volume = float(np.sum(system.mass[0]))
    scale = max(system.norm(k, a) * math.sqrt(volume), 1.0)
    return CompatibilityDefect(pairings, exact, COMPATIBILITY_TOLERANCE * scale)


def weak_residual(
    theta: Cochain,
    problem: PLaplaceProblem,
    test_basis: Optional[np.ndarray] = None,
    epsilon: Optional[float] = None,
) -> float:
    """``max_j |G(theta)[phi_j]| / ||phi_j||`` over a test basis (columns).

    The default basis is the unit cochains, which spans all k-cochains.
    """
    g = problem.energy_gradient(theta, epsilon)
    mass = problem.system.mass[problem.degree]
    if test_basis is None:
        return float(np.max(np.abs(g) / np.sqrt(mass), initial=0.0))
    basis = np.asarray(test_basis, dtype=float)
    norms = np.sqrt(np.sum(mass[:, None] * basis * basis, axis=0))
    return float(np.max(np.abs(basis.T @ g) / norms, initial=0.0))
