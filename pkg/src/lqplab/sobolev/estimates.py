"""Best Sobolev constants, solvability of d eta = omega and Hoelder monotonicity.

Estimates work on the discrete cochains of a circle or torus grid: a test
form is sampled at its staggered nodes, differentiated by the forward
coboundary and measured in the weighted l^p norms of the level weights. For
p = q = 2 on a uniform grid the best constant is known exactly from the
spectral gap, ``1/sqrt(lambda_1)``.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize

from lqplab.complex.constants import (
    SMOOTHING,
    ConstantReport,
    corrector_constant,
    weighted_norm,
)
from lqplab.complex.discretize import discretize
from lqplab.errors import (
    ExponentViolation,
    FormError,
    NonConvergenceError,
    PreconditionError,
)
from lqplab.forms.form import DifferentialForm
from lqplab.forms.multiindex import multi_indices
from lqplab.forms.norms import lp_norm
from lqplab.geometry import (
    ChartDomain,
    DiagonalMetric,
    ExponentPair,
    Grid,
    build_grid,
    sobolev_exponent_check,
    volume,
)
from lqplab.geometry.exponents import ExponentLike
from lqplab.hodge.system import (
    DiscreteHodgeSystem,
    green,
    harmonic_basis,
    harmonic_projection,
    hodge_decompose,
    spectral_gap,
)
from lqplab.homotopy.cone import HomotopyConfig, poincare_primitive
from lqplab.sobolev.families import TrigFamily

logger = logging.getLogger(__name__)

OBJECTIVE_TOLERANCE = 1e-8
SOLVABILITY_DENSE_LIMIT = 1024
OBSTRUCTION_TOLERANCE = 1e-9
EQUALITY_TOLERANCE = 1e-9


def _discrete_norm(
    system: DiscreteHodgeSystem, k: int, x: np.ndarray, p: float
) -> float:
    return float(weighted_norm(x, system.mass[k], p))


def _reject_violation(pair: ExponentPair, n: int) -> None:
    check = sobolev_exponent_check(pair, n)
    if not check.admissible:
        raise ExponentViolation(
            f"1/p - 1/q > 1/{n} for (p, q) = ({pair}); beyond this range the ball "
            "witness exhibits nonvanishing cohomology and no Sobolev inequality holds"
        )


def closed_distance(
    system: DiscreteHodgeSystem, k: int, theta: np.ndarray, q: float
) -> float:
    """``inf_{zeta closed} ||theta - zeta||_q`` over discrete closed k-cochains.

    Closed cochains are ``d u + H c`` (exact plus harmonic). For q = 2 the
    minimizer leaves the coexact part of theta. Other q are minimized by
    L-BFGS over (u, c) starting from the q = 2 minimizer, with
    ``|r|^q`` smoothed at zero for q < 2.

    Raises:
        NonConvergenceError: If the minimizer reports failure.
    """
    if not np.any(theta):
        return 0.0
    if q == 2.0:
        return _discrete_norm(system, k, hodge_decompose(system, k, theta).coexact, 2.0)
    mass = system.mass[k]
    basis = harmonic_basis(system, k)
    if k >= 1:
        d_prev = system.d[k - 1]
        u0 = system.apply_delta(k, green(system, k, theta))
    else:
        d_prev = None
        u0 = np.zeros(0)
    c0 = basis.T @ (mass * theta)
    n_u = u0.size
    scale = max(float(np.max(np.abs(theta))), 1e-300)
    eps = SMOOTHING * scale

    def residual(z: np.ndarray) -> np.ndarray:
        r = theta - basis @ z[n_u:]
        if d_prev is not None:
            r = r - d_prev @ z[:n_u]
        return r

    def objective(z: np.ndarray):
        r = residual(z)
        a = (r * r + eps * eps) ** 0.5
        value = float(np.sum(mass * a**q))
        g = mass * q * a ** (q - 2.0) * r
        grad_c = -(basis.T @ g)
        grad_u = -(d_prev.T @ g) if d_prev is not None else np.zeros(0)
        return value, np.concatenate([grad_u, grad_c])

    start = np.concatenate([u0, c0])
    result = minimize(
        objective,
        start,
        jac=True,
        method="L-BFGS-B",
        options={"ftol": OBJECTIVE_TOLERANCE * 1e-3, "gtol": 1e-12, "maxiter": 5000},
    )
    if not result.success and result.nit >= 5000:
        raise NonConvergenceError(
            f"Closed-distance minimization failed: {result.message}",
            residual=float(np.linalg.norm(result.jac)),
        )
    return _discrete_norm(system, k, residual(result.x), q)


@dataclass
class SobolevEstimate:
    """Lower bound on the best C in ``inf_zeta ||theta - zeta||_q <= C ||d theta||_p``.

    ``exact`` is the spectral value where it is known (p = q = 2 on a uniform
    grid). ``solvability`` is the corrector constant of the discretized complex
    when requested.
    """

    domain: Dict[str, Any]
    degree: int
    p: float
    q: float
    resolution: int
    lower_bound: float
    best_member: str
    method: str
    members: Dict[str, float] = field(default_factory=dict)
    exact: Optional[float] = None
    solvability: Optional[ConstantReport] = None

    @property
    def consistent(self) -> bool:
        if self.exact is None:
            return True
        return self.lower_bound <= self.exact + 1e-3

    def to_dict(self) -> Dict[str, Any]:
        return {
            "domain": self.domain,
            "degree": self.degree,
            "p": self.p,
            "q": self.q,
            "resolution": self.resolution,
            "lower_bound": self.lower_bound,
            "best_member": self.best_member,
            "method": self.method,
            "exact": self.exact,
            "consistent": self.consistent,
            "solvability": (
                None
                if self.solvability is None
                else {
                    "method": self.solvability.method,
                    "value": self.solvability.value,
                }
            ),
            "members": self.members,
        }


def estimate_constant(
    domain: ChartDomain,
    k: int,
    p: ExponentLike,
    q: ExponentLike,
    family: Optional[TrigFamily] = None,
    resolution: int = 256,
    metric: Optional[DiagonalMetric] = None,
    with_solvability: bool = False,
) -> SobolevEstimate:
    """Maximize ``inf_zeta ||theta - zeta||_q / ||d theta||_p`` over a family.

    Args:
        domain: Circle or torus
        k: Degree of the test forms, below the dimension
        p, q: Exponents
        family: Test family (default trigonometric up to degree 3)
        resolution: Grid nodes per axis
        metric: Metric supplying the level weights
        with_solvability: Also compute the corrector constant of the
            discretized complex (dense, small grids only)

    Raises:
        ExponentViolation: If ``1/p - 1/q > 1/n``.
        PreconditionError: On domains other than circles and tori.
    """
    pair = ExponentPair.of(p, q)
    n = domain.dim
    _reject_violation(pair, n)
    if not domain.is_closed:
        raise PreconditionError(
            f"Constant estimates need a circle or torus, got {domain.kind}"
        )
    if not 0 <= k < n:
        raise PreconditionError(f"Degree {k} has no differential in dimension {n}")
    family = family or TrigFamily()
    grid = build_grid(domain, resolution)
    system = DiscreteHodgeSystem.build(grid, metric)
    members: Dict[str, float] = {}
    for form in family.members(domain, k):
        theta = system.cochain(form)
        d_theta = system.apply_d(k, theta)
        denominator = _discrete_norm(system, k + 1, d_theta, pair.p)
        if denominator <= 1e-12 * max(float(np.max(np.abs(theta))), 1e-300):
            continue
        members[form.label] = closed_distance(system, k, theta, pair.q) / denominator
    if not members:
        raise PreconditionError("Every family member is closed; no ratio to estimate")
    best = max(members, key=members.__getitem__)
    exact = None
    if pair.p == 2.0 and pair.q == 2.0 and system.uniform:
        exact = 1.0 / math.sqrt(spectral_gap(system, k))
    solvability = None
    if with_solvability:
        if system.size(k) > SOLVABILITY_DENSE_LIMIT:
            raise PreconditionError(
                "Dense solvability constants need at most "
                f"{SOLVABILITY_DENSE_LIMIT} unknowns"
            )
        metric = metric or DiagonalMetric.euclidean(n)
        complex_ = discretize(domain, metric, grid, k + 1)
        solvability = corrector_constant(complex_, k + 1, pair.p, pair.q)
    logger.info(
        "Sobolev estimate on %s (k=%d, p=%s, q=%s): %.8g from %s",
        domain.kind,
        k,
        pair.p,
        pair.q,
        members[best],
        best,
    )
    return SobolevEstimate(
        domain.to_dict(),
        k,
        pair.p,
        pair.q,
        resolution,
        members[best],
        best,
        "projection" if pair.q == 2.0 else "convex-opt",
        members,
        exact,
        solvability,
    )


def resolution_ladder(
    domain: ChartDomain,
    k: int,
    p: ExponentLike,
    q: ExponentLike,
    resolutions: Sequence[int] = (32, 64, 128),
    family: Optional[TrigFamily] = None,
) -> List[SobolevEstimate]:
    """Estimates along a refinement ladder, for the CSV tables."""
    return [estimate_constant(domain, k, p, q, family, r) for r in resolutions]


@dataclass
class ObstructionReport:
    """Pairings of a closed form against the harmonic coordinate forms.

    A nonzero pairing ``int <omega, dx^I> dvol`` (for top degree,
    ``int omega ^ 1``) blocks ``d eta = omega``.
    """

    degree: int
    pairings: Dict[str, float]
    harmonic_norm: float
    tolerance: float

    @property
    def blocking(self) -> List[str]:
        return [name for name, v in self.pairings.items() if abs(v) > self.tolerance]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "degree": self.degree,
            "pairings": self.pairings,
            "harmonic_norm": self.harmonic_norm,
            "blocking": self.blocking,
        }


@dataclass
class SolvabilityReport:
    """Primitive of a closed form, or the obstruction that prevents one."""

    domain: str
    degree: int
    p: float
    q: float
    method: str
    eta: Optional[Union[DifferentialForm, np.ndarray]] = None
    ratio: Optional[float] = None
    residual: Optional[float] = None
    bound: Optional[float] = None
    obstruction: Optional[ObstructionReport] = None

    @property
    def solvable(self) -> bool:
        return self.obstruction is None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "domain": self.domain,
            "degree": self.degree,
            "p": self.p,
            "q": self.q,
            "method": self.method,
            "solvable": self.solvable,
            "ratio": self.ratio,
            "residual": self.residual,
            "bound": self.bound,
            "obstruction": (
                None if self.obstruction is None else self.obstruction.to_dict()
            ),
        }


def _pairing_name(n: int, index) -> str:
    if len(index) == n:
        return "int omega ^ 1"
    basis = "^".join(f"dx{i + 1}" for i in index) or "1"
    return f"int <omega, {basis}> dvol"


def _solve_on_torus(
    omega: DifferentialForm, pair: ExponentPair, resolution: int, metric
) -> SolvabilityReport:
    domain = omega.domain
    n, k = domain.dim, omega.degree
    grid = build_grid(domain, resolution)
    system = DiscreteHodgeSystem.build(grid, metric)
    w = system.cochain(omega)
    scale = system.norm(k, w)
    if scale == 0.0:
        eta = np.zeros(system.size(k - 1) if k >= 1 else 0)
        return SolvabilityReport(domain.kind, k, pair.p, pair.q, "hodge", eta, 0.0, 0.0)
    if k < n and system.norm(k + 1, system.apply_d(k, w)) > 1e-8 * scale:
        raise FormError("Form is not closed on the grid")
    m = grid.size
    mass = system.mass[k]
    pairings = {
        _pairing_name(n, index): float(
            np.sum(mass[c * m : (c + 1) * m] * w[c * m : (c + 1) * m])
        )
        for c, index in enumerate(multi_indices(n, k))
    }
    harmonic_norm = system.norm(k, harmonic_projection(system, k, w))
    total_volume = float(np.sum(system.mass[0]))
    if harmonic_norm > OBSTRUCTION_TOLERANCE * scale:
        obstruction = ObstructionReport(
            k,
            pairings,
            harmonic_norm,
            OBSTRUCTION_TOLERANCE * scale * math.sqrt(total_volume),
        )
        logger.info("Closed %d-form is obstructed: %s", k, obstruction.blocking)
        return SolvabilityReport(
            domain.kind, k, pair.p, pair.q, "hodge", obstruction=obstruction
        )
    if k == 0:
        return SolvabilityReport(
            domain.kind, k, pair.p, pair.q, "hodge", np.zeros(0), 0.0, 0.0
        )
    eta = system.apply_delta(k, green(system, k, w))
    residual = system.norm(k, system.apply_d(k - 1, eta) - w) / scale
    ratio = _discrete_norm(system, k - 1, eta, pair.q) / _discrete_norm(
        system, k, w, pair.p
    )
    return SolvabilityReport(
        domain.kind, k, pair.p, pair.q, "hodge", eta, ratio, residual
    )


def verify_solvability(
    omega: DifferentialForm,
    p: ExponentLike,
    q: ExponentLike,
    resolution: Union[int, Sequence[int]] = 64,
    config: Optional[HomotopyConfig] = None,
    metric: Optional[DiagonalMetric] = None,
) -> SolvabilityReport:
    """Solve ``d eta = omega`` for a closed form and report ``||eta||_q / ||omega||_p``.

    On a ball the primitive is the averaged homotopy ``T omega`` (the ratio is
    compared with the Riesz kernel bound); on a circle or torus it is
    ``delta G omega`` on the grid, unless omega has a harmonic part, in which
    case an :class:`ObstructionReport` names the blocking pairings.

    Raises:
        ExponentViolation: Inadmissible exponents on the ball.
        PreconditionError: On other domains or for 0-forms on a ball.
    """
    pair = ExponentPair.of(p, q)
    domain = omega.domain
    if domain.is_closed:
        res = resolution if isinstance(resolution, int) else int(resolution[0])
        return _solve_on_torus(omega, pair, res, metric)
    if domain.kind != "ball":
        raise PreconditionError(
            f"Solvability is checked on balls and tori, not {domain.kind}"
        )
    _reject_violation(pair, domain.dim)
    if omega.degree == 0:
        raise PreconditionError(
            "Closed 0-forms on a ball are constants; nothing to solve"
        )
    grid_res = (24, 48) if isinstance(resolution, int) else tuple(resolution)
    grid = build_grid(domain, grid_res)
    config = config or HomotopyConfig.point(np.zeros(domain.dim))
    primitive = poincare_primitive(omega, pair.p, pair.q, config, grid, metric)
    return SolvabilityReport(
        domain.kind,
        omega.degree,
        pair.p,
        pair.q,
        "homotopy",
        primitive.eta,
        primitive.ratio,
        primitive.residual,
        primitive.bound.kernel_norm,
    )


@dataclass
class HolderEntry:
    label: str
    norm_small: float
    scaled_norm_large: float

    @property
    def holds(self) -> bool:
        return self.norm_small <= self.scaled_norm_large * (1.0 + 1e-12)

    @property
    def equality(self) -> bool:
        gap = abs(self.norm_small - self.scaled_norm_large)
        return gap <= EQUALITY_TOLERANCE * max(self.scaled_norm_large, 1e-300)

    @property
    def slack(self) -> float:
        if self.norm_small == 0.0:
            return math.inf
        return self.scaled_norm_large / self.norm_small


@dataclass
class MonotonicityCheck:
    """``||theta||_{q1} <= vol^{1/q1 - 1/q2} ||theta||_{q2}`` on each sample."""

    q_small: float
    q_large: float
    volume: float
    factor: float
    entries: List[HolderEntry]

    @property
    def holds(self) -> bool:
        return all(e.holds for e in self.entries)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q_small": self.q_small,
            "q_large": self.q_large,
            "volume": self.volume,
            "factor": self.factor,
            "holds": self.holds,
            "entries": [
                {
                    "label": e.label,
                    "norm_small": e.norm_small,
                    "scaled_norm_large": e.scaled_norm_large,
                    "equality": e.equality,
                }
                for e in self.entries
            ],
        }


def monotonicity_check(
    samples: Sequence[DifferentialForm],
    q_small: ExponentLike,
    q_large: ExponentLike,
    grid: Grid,
    metric: Optional[DiagonalMetric] = None,
) -> MonotonicityCheck:
    """Hoelder embedding ``L^{q2} -> L^{q1}`` on a finite-volume domain.

    Raises:
        PreconditionError: On infinite-volume domains or when ``q1 > q2``.
    """
    domain = grid.domain
    if not domain.has_finite_volume:
        raise PreconditionError(f"{domain.kind} has infinite volume")
    pair = ExponentPair.of(q_small, q_large)
    q1, q2 = pair.p, pair.q
    if q1 > q2:
        raise PreconditionError(f"Need q1 <= q2, got {q1} > {q2}")
    metric = metric or DiagonalMetric.euclidean(domain.dim)
    vol = volume(domain, metric, grid)
    factor = vol ** float(pair.inv_p - pair.inv_q)
    entries = []
    for i, theta in enumerate(samples):
        small = lp_norm(theta, metric, grid, q1).value
        large = lp_norm(theta, metric, grid, q2).value
        entries.append(HolderEntry(theta.label or f"sample-{i}", small, factor * large))
    report = MonotonicityCheck(q1, q2, vol, factor, entries)
    if not report.holds:
        failed = sum(not e.holds for e in entries)
        logger.warning("Hoelder embedding failed on %d samples", failed)
    return report
