"""Regularization ``R_eps`` by averaged pullbacks and the homotopy ``A_eps``."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from lqplab.errors import FormError
from lqplab.forms.calculus import DEFAULT_PROBE_STEP, exterior_derivative
from lqplab.forms.form import DifferentialForm, Representation
from lqplab.forms.norms import lp_norm
from lqplab.forms.pullback import pullback_values
from lqplab.geometry import DiagonalMetric, Grid
from lqplab.homotopy.cone import HomotopyConfig, averaged_homotopy
from lqplab.smoothing.deformation import DeformationMap, DeRhamDeformation
from lqplab.smoothing.mollifier import MollifierSpec

logger = logging.getLogger(__name__)

# Bounds the (nodes x points) batch of a single pullback evaluation.
BATCH_POINTS = 200_000


def _regularized_values(
    omega: DifferentialForm,
    deformation: DeRhamDeformation,
    mollifier: MollifierSpec,
    points: np.ndarray,
) -> np.ndarray:
    out = omega(points)
    mask = deformation.inside(points)
    if not np.any(mask):
        return out
    inside = points[mask]
    m = inside.shape[0]
    acc = np.zeros((omega.n_components, m))
    chunk = max(1, BATCH_POINTS // m)
    for start in range(0, mollifier.size, chunk):
        shifts = mollifier.shifts[start : start + chunk]
        weights = mollifier.weights[start : start + chunk]
        stacked = np.tile(inside, (len(shifts), 1))
        per_point = np.repeat(shifts, m, axis=0)
        values = pullback_values(
            omega, DeformationMap(deformation, per_point), stacked, check_singular=False
        )
        acc += np.einsum("j,cjm->cm", weights, values.reshape(-1, len(shifts), m))
    out[:, mask] = acc
    return out


def regularize(
    omega: DifferentialForm,
    deformation: DeRhamDeformation,
    mollifier: MollifierSpec,
) -> DifferentialForm:
    """``R_eps omega = sum_j w_j s_{v_j}^* omega``.

    The result agrees with omega outside the deformation ball. When omega
    carries a differential, ``R_eps d omega`` is attached as the differential
    of the result.
    """
    if deformation.dim != omega.dim or mollifier.dim != omega.dim:
        raise FormError("Deformation, mollifier and form dimensions differ")

    def evaluator(points: np.ndarray) -> np.ndarray:
        return _regularized_values(omega, deformation, mollifier, points)

    differential = None
    if omega.differential is not None:
        differential = regularize(omega.differential, deformation, mollifier)
    return DifferentialForm(
        omega.degree,
        omega.domain,
        evaluator,
        Representation.LAZY,
        differential,
        label=f"R({omega.label})" if omega.label else "",
    )


def commutation_defect(
    omega: DifferentialForm,
    deformation: DeRhamDeformation,
    mollifier: MollifierSpec,
    points: np.ndarray,
    step: float = DEFAULT_PROBE_STEP,
) -> float:
    """``max |d R omega - R d omega|`` with d R omega from the probe stencil."""
    if omega.differential is None:
        raise FormError("commutation_defect needs a form with an exact differential")
    bare = DifferentialForm(omega.degree, omega.domain, omega.evaluator)
    plain = regularize(bare, deformation, mollifier)
    probed = exterior_derivative(plain, step=step)(points)
    exact = regularize(omega.differential, deformation, mollifier)(points)
    return float(np.max(np.abs(probed - exact), initial=0.0))


@dataclass
class NormProbeReport:
    """Graph-norm ratios ``||R omega|| / ||omega||`` over a sample set."""

    epsilon: float
    p: float
    q: float
    ratios: List[float]

    @property
    def maximum(self) -> float:
        return max(self.ratios)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "p": self.p,
            "q": self.q,
            "ratios": self.ratios,
        }


def graph_norm(
    omega: DifferentialForm, metric: DiagonalMetric, grid: Grid, p: float, q: float
) -> float:
    """``||omega||_q + ||d omega||_p``; top-degree forms have no second term."""
    value = lp_norm(omega, metric, grid, q).value
    if omega.degree < omega.dim:
        value += lp_norm(exterior_derivative(omega), metric, grid, p).value
    return value


def operator_norm_probe(
    samples: Sequence[DifferentialForm],
    deformation: DeRhamDeformation,
    mollifier: MollifierSpec,
    grid: Grid,
    p: float,
    q: float,
    metric: Optional[DiagonalMetric] = None,
) -> NormProbeReport:
    """Estimate the graph-norm operator norm of ``R_eps`` from below."""
    if not samples:
        raise FormError("operator_norm_probe needs at least one sample form")
    metric = metric or DiagonalMetric.euclidean(grid.dim)
    ratios = []
    for omega in samples:
        base = graph_norm(omega, metric, grid, p, q)
        if base == 0:
            raise FormError("Sample forms must be nonzero")
        smoothed = graph_norm(
            regularize(omega, deformation, mollifier), metric, grid, p, q
        )
        ratios.append(smoothed / base)
    logger.info(
        "R_eps graph-norm ratios at eps=%g: max %.6f", mollifier.epsilon, max(ratios)
    )
    return NormProbeReport(mollifier.epsilon, float(p), float(q), ratios)


def homotopy_A(
    omega: DifferentialForm,
    deformation: DeRhamDeformation,
    mollifier: MollifierSpec,
    config: HomotopyConfig,
) -> DifferentialForm:
    """``A_eps omega = (I - R_eps) T omega``; vanishes outside the deformation ball."""
    t_omega = averaged_homotopy(omega, config)
    smoothed = regularize(t_omega, deformation, mollifier)

    def evaluator(points: np.ndarray) -> np.ndarray:
        return t_omega(points) - smoothed(points)

    return DifferentialForm(
        omega.degree - 1, omega.domain, evaluator, Representation.LAZY
    )


def homotopy_A_residual(
    omega: DifferentialForm,
    deformation: DeRhamDeformation,
    mollifier: MollifierSpec,
    config: HomotopyConfig,
    points: np.ndarray,
    step: float = DEFAULT_PROBE_STEP,
) -> float:
    """``max |(I - R) omega - d A omega - A d omega|`` at the points."""
    if omega.degree < omega.dim and omega.differential is None:
        raise FormError("homotopy_A_residual needs a form with an exact differential")
    lhs = omega(points) - regularize(omega, deformation, mollifier)(points)
    a_omega = homotopy_A(omega, deformation, mollifier, config)
    rhs = exterior_derivative(a_omega, step=step)(points)
    if omega.degree < omega.dim:
        lower = homotopy_A(
            omega.differential, deformation, mollifier, config  # type: ignore[arg-type]
        )
        rhs = rhs + lower(points)
    return float(np.max(np.abs(lhs - rhs), initial=0.0))


def total_variation(values: np.ndarray, shape: Sequence[int]) -> float:
    """Sum of absolute differences of coefficient samples along every grid axis."""
    data = np.asarray(values, dtype=float).reshape((-1,) + tuple(shape))
    return float(
        sum(np.sum(np.abs(np.diff(data, axis=1 + a))) for a in range(len(shape)))
    )


@dataclass
class ConvergenceLadder:
    """``||R_eps omega - omega||_p`` along decreasing eps."""

    epsilons: List[float]
    distances: List[float]
    total_variation: List[float] = field(default_factory=list)
    reference_variation: float = 0.0

    @property
    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.distances, self.distances[1:]))

    @property
    def variation_nonincreasing(self) -> bool:
        """Advisory: coefficient variation of ``R omega`` at most that of omega."""
        bound = self.reference_variation * (1 + 1e-9)
        return all(tv <= bound for tv in self.total_variation)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilons": self.epsilons,
            "distances": self.distances,
            "strictly_decreasing": self.strictly_decreasing,
            "total_variation": self.total_variation,
            "reference_variation": self.reference_variation,
            "variation_nonincreasing": self.variation_nonincreasing,
        }


def regularization_ladder(
    omega: DifferentialForm,
    deformation: DeRhamDeformation,
    epsilons: Sequence[float],
    grid: Grid,
    p: float = 2.0,
    nodes_per_axis: int = 21,
    metric: Optional[DiagonalMetric] = None,
) -> ConvergenceLadder:
    """Distances ``||R_eps omega - omega||_p`` and coefficient variations."""
    metric = metric or DiagonalMetric.euclidean(grid.dim)
    distances, variations = [], []
    reference = 0.0
    if grid.is_tensor:
        reference = total_variation(omega(grid.points), grid.shape)
    for eps in epsilons:
        mollifier = MollifierSpec.build(grid.dim, eps, nodes_per_axis)
        smoothed = regularize(omega, deformation, mollifier)
        values = smoothed(grid.points)
        difference = DifferentialForm(
            omega.degree,
            omega.domain,
            lambda pts, s=smoothed: s(pts) - omega(pts),
        )
        distances.append(lp_norm(difference, metric, grid, p).value)
        if grid.is_tensor:
            variations.append(total_variation(values, grid.shape))
        logger.debug("eps=%g: distance %.6e", eps, distances[-1])
    return ConvergenceLadder(
        list(map(float, epsilons)), distances, variations, reference
    )


def compose_regularizations(
    omega: DifferentialForm,
    charts: Sequence[Tuple[DeRhamDeformation, MollifierSpec]],
) -> DifferentialForm:
    """Apply ``R_1 o R_2 o ...`` for several chart balls, innermost last in the list."""
    result = omega
    for deformation, mollifier in reversed(list(charts)):
        result = regularize(result, deformation, mollifier)
    return result
