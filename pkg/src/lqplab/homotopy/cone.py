"""Cone and averaged homotopy operators on convex chart domains.

For a base point a the cone operator on k-forms is

    (K_a theta)(x) = int_0^1 t^{k-1} i_{x-a} theta(a + t (x - a)) dt,

and the averaged operator is ``T = sum_j w_j K_{a_j}`` over a finite base
set with positive weights summing to one. Both satisfy
``T d theta + d T theta = theta`` on star-shaped domains. The radial
integral uses a Gauss-Legendre rule on [0, 1] with ``t^{k-1}`` kept in the
integrand.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np
import sympy

from lqplab.errors import FormError, GeometryError, InadmissibleExponents
from lqplab.forms.calculus import (
    DEFAULT_PROBE_STEP,
    exterior_derivative,
    interior_product_values,
)
from lqplab.forms.form import (
    DifferentialForm,
    Representation,
    default_symbols,
    symbolic_form,
)
from lqplab.forms.multiindex import multi_indices
from lqplab.forms.norms import lp_norm
from lqplab.geometry import ChartDomain, DiagonalMetric, Grid
from lqplab.geometry.exponents import ExponentLike
from lqplab.geometry.grid import gauss_legendre
from lqplab.homotopy.riesz import BoundStatus, RieszBound, riesz_bound
from lqplab.profiles import bump

logger = logging.getLogger(__name__)

DEFAULT_RADIAL_ORDER = 32


@dataclass(frozen=True, eq=False)
class HomotopyConfig:
    """Base set of the averaged homotopy operator.

    A point base has a single node with weight one. Nodes must lie strictly
    inside the domain of every form the operator is applied to.
    """

    nodes: np.ndarray
    weights: np.ndarray
    radial_order: int = DEFAULT_RADIAL_ORDER

    def __post_init__(self):
        nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if nodes.shape[0] != weights.size:
            raise GeometryError("One weight per base node is required")
        if not np.all(weights > 0):
            raise GeometryError("Base weights must be positive")
        if abs(float(np.sum(weights)) - 1.0) > 1e-12:
            raise GeometryError(f"Base weights must sum to 1, got {np.sum(weights)}")
        if self.radial_order < 1:
            raise GeometryError("Radial quadrature order must be positive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def point(cls, a: Sequence[float], radial_order: int = DEFAULT_RADIAL_ORDER):
        return cls(np.asarray(a, dtype=float)[None, :], np.ones(1), radial_order)

    @property
    def is_point(self) -> bool:
        return self.nodes.shape[0] == 1

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    def check_inside(self, domain: ChartDomain) -> None:
        if self.dim != domain.dim:
            raise GeometryError("Base nodes and domain dimensions differ")
        inside = domain.contains(self.nodes, strict=True)
        if not np.all(inside):
            raise GeometryError(
                f"{int(np.sum(~inside))} base nodes are not strictly inside the "
                f"{domain.kind}"
            )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "nodes": self.nodes.tolist(),
            "weights": self.weights.tolist(),
            "radial_order": self.radial_order,
        }


def symmetric_base(
    n: int,
    radius: float,
    count: int = 4,
    center: Optional[Sequence[float]] = None,
    radial_order: int = DEFAULT_RADIAL_ORDER,
) -> HomotopyConfig:
    """Equally weighted nodes placed symmetrically around a centre.

    In the plane ``count`` nodes sit on a circle; in higher dimension the
    ``2n`` nodes ``c +- radius e_i`` are used.
    """
    c = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    if n == 2:
        angles = 2.0 * math.pi * np.arange(count) / count
        nodes = c + radius * np.stack([np.cos(angles), np.sin(angles)], 1)
    else:
        eye = np.eye(n)
        nodes = c + radius * np.vstack([eye, -eye])
    return HomotopyConfig(nodes, np.full(len(nodes), 1.0 / len(nodes)), radial_order)


def mollified_base(
    n: int,
    radius: float,
    order: int = 6,
    center: Optional[Sequence[float]] = None,
    radial_order: int = DEFAULT_RADIAL_ORDER,
) -> HomotopyConfig:
    """Base nodes from a tensor Gauss rule weighted by a bump of the given radius."""
    c = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    u, w = gauss_legendre(order, -1.0, 1.0)
    grids = np.meshgrid(*([u] * n), indexing="ij")
    points = np.stack([g.ravel() for g in grids], 1)
    weights = np.prod(
        np.stack([g.ravel() for g in np.meshgrid(*([w] * n), indexing="ij")]), axis=0
    ) * bump(np.linalg.norm(points, axis=1))
    keep = weights > 0
    weights = weights[keep] / np.sum(weights[keep])
    return HomotopyConfig(c + radius * points[keep], weights, radial_order)


def _averaged_values(
    theta: DifferentialForm,
    nodes: np.ndarray,
    node_weights: np.ndarray,
    radial_order: int,
    points: np.ndarray,
) -> np.ndarray:
    n, k = theta.dim, theta.degree
    t, wt = gauss_legendre(radial_order)
    m = points.shape[0]
    out = np.zeros((len(multi_indices(n, k - 1)), m))
    for a, wa in zip(nodes, node_weights):
        u = points - a
        samples = a + (t[:, None, None] * u[None, :, :]).reshape(-1, n)
        values = theta(samples).reshape(-1, len(t), m)
        radial = np.einsum("j,cjm->cm", wt * t ** (k - 1), values)
        out += wa * interior_product_values(u.T, radial, n, k)
    return out


def cone_homotopy(
    theta: DifferentialForm,
    a: Sequence[float],
    radial_order: int = DEFAULT_RADIAL_ORDER,
) -> DifferentialForm:
    """Cone homotopy ``K_a theta`` of degree k - 1.

    Raises:
        FormError: For 0-forms.
        GeometryError: If ``a`` is not strictly inside the domain.
    """
    return averaged_homotopy(theta, HomotopyConfig.point(a, radial_order))


def averaged_homotopy(
    theta: DifferentialForm, config: HomotopyConfig
) -> DifferentialForm:
    """Averaged homotopy ``T theta = sum_j w_j K_{a_j} theta``."""
    if theta.degree == 0:
        raise FormError("The homotopy operator is defined on k-forms with k >= 1")
    config.check_inside(theta.domain)

    def evaluator(points: np.ndarray) -> np.ndarray:
        return _averaged_values(
            theta, config.nodes, config.weights, config.radial_order, points
        )

    return DifferentialForm(
        theta.degree - 1,
        theta.domain,
        evaluator,
        Representation.LAZY,
        label=f"T({theta.label})" if theta.label else "",
    )


def homotopy_residual(
    theta: DifferentialForm,
    config: HomotopyConfig,
    grid: Grid,
    step: float = DEFAULT_PROBE_STEP,
) -> float:
    """``max |T d theta + d T theta - theta|`` over grid nodes and coefficients.

    ``theta`` must carry its exact differential unless it has top degree, so
    that only radial quadrature and probe errors remain.
    """
    n, k = theta.dim, theta.degree
    if k < n and theta.differential is None:
        raise FormError("homotopy_residual needs a form with an exact differential")
    points = grid.points
    total = exterior_derivative(averaged_homotopy(theta, config), step=step)(points)
    if k < n:
        lower = averaged_homotopy(theta.differential, config)  # type: ignore[arg-type]
        total = total + lower(points)
    residual = float(np.max(np.abs(total - theta(points)), initial=0.0))
    logger.debug("Homotopy residual of degree-%d form: %.3e", k, residual)
    return residual


@dataclass
class PrimitiveReport:
    """Primitive ``eta = T omega`` of a closed form with its L^q / L^p ratio."""

    eta: DifferentialForm
    ratio: float
    norm_eta: float
    norm_omega: float
    residual: float
    bound: RieszBound

    @property
    def within_bound(self) -> Optional[bool]:
        if self.bound.kernel_norm is None:
            return None
        return self.ratio <= self.bound.kernel_norm

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ratio": self.ratio,
            "norm_eta": self.norm_eta,
            "norm_omega": self.norm_omega,
            "residual": self.residual,
            "within_bound": self.within_bound,
            "bound": self.bound.to_dict(),
        }


def poincare_primitive(
    omega: DifferentialForm,
    p: ExponentLike,
    q: ExponentLike,
    config: HomotopyConfig,
    grid: Grid,
    metric: Optional[DiagonalMetric] = None,
    closed_tolerance: float = 1e-8,
    step: float = DEFAULT_PROBE_STEP,
) -> PrimitiveReport:
    """Primitive of a closed form on a convex domain through the homotopy operator.

    Raises:
        InadmissibleExponents: Unless ``1/p - 1/q <= 1/n``; beyond that range
            the ball carries nonvanishing L_{q,p} cohomology and no bounded
            primitive exists in general.
        FormError: If omega is not closed within ``closed_tolerance``.
    """
    domain = omega.domain
    n = domain.dim
    bound = riesz_bound(n, p, q, domain.diameter)
    if bound.status is BoundStatus.INADMISSIBLE:
        raise InadmissibleExponents(
            f"No bounded primitive for (p, q) = ({bound.pair}): {bound.failing}; "
            "the ball witness shows nonvanishing cohomology in this range"
        )
    metric = metric or DiagonalMetric.euclidean(n)
    points = grid.points
    if omega.degree < n:
        d_omega = exterior_derivative(omega, step=step)(points)
        defect = float(np.max(np.abs(d_omega), initial=0.0))
        if defect > closed_tolerance:
            raise FormError(f"Form is not closed: |d omega| = {defect:.3e}")
    eta = averaged_homotopy(omega, config)
    residual = float(
        np.max(np.abs(exterior_derivative(eta, step=step)(points) - omega(points)))
    )
    norm_eta = lp_norm(eta, metric, grid, bound.pair.q).value
    norm_omega = lp_norm(omega, metric, grid, bound.pair.p).value
    ratio = norm_eta / norm_omega if norm_omega > 0 else 0.0
    logger.info(
        "Poincare primitive: ratio %.6g, residual %.3e, bound %s",
        ratio,
        residual,
        bound.kernel_norm,
    )
    return PrimitiveReport(eta, ratio, norm_eta, norm_omega, residual, bound)


def random_polynomial_form(
    domain: ChartDomain,
    degree: int,
    max_power: int,
    rng: np.random.Generator,
) -> DifferentialForm:
    """Symbolic form whose coefficients are random polynomials of bounded degree."""
    symbols = default_symbols(domain)
    n = domain.dim
    monomials = [
        sympy.Mul(*[s**e for s, e in zip(symbols, powers)])
        for powers in np.ndindex(*([max_power + 1] * n))
        if sum(powers) <= max_power
    ]
    components = []
    for _ in multi_indices(n, degree):
        coefficients = rng.integers(-3, 4, size=len(monomials))
        components.append(sum(int(c) * m for c, m in zip(coefficients, monomials)))
    return symbolic_form(degree, domain, components, symbols, label="random polynomial")
