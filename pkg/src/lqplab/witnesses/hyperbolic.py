"""Nonvanishing witnesses on the horocyclic half-plane model of H^2.

Coordinates are (y, z) with metric ``e^{2z} dy^2 + dz^2``. The witnesses are
``f = c h1(y) k(z)`` and ``g = h2(y) k(z)`` with

* ``k(z) = S(z)``: 0 for z <= 0, 1 for z >= 1;
* ``h1(y) = S(2y) S(2 - 2y)``: 0 outside [0, 1], rising on [0, 1/2], falling
  on [1/2, 1];
* ``h2(y) = S(2y + 2) (1 - S(2y))``: 1 on [-1/2, 0], 0 outside (-1, 1/2).

On [1/2, 1] h2 vanishes, so ``h1' h2 >= 0`` and ``h1 h2' <= 0`` everywhere and
``df ^ dg = c k k' (h1' h2 - h1 h2') dy ^ dz`` is nonnegative. The constant c
normalizes the pairing ``int df ^ dg`` to one.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Sequence

import numpy as np
from scipy import integrate

from lqplab.errors import PreconditionError
from lqplab.forms.calculus import exterior_derivative
from lqplab.forms.form import DifferentialForm, Representation, analytic_form, zero_form
from lqplab.forms.norms import lp_norm, pairing_integral, top_coefficient
from lqplab.geometry import ChartDomain, DiagonalMetric, Grid, build_grid
from lqplab.geometry.exponents import ExponentLike, ExponentPair
from lqplab.geometry.grid import trapezoid_weights
from lqplab.profiles import smooth_step, smooth_step_derivative
from lqplab.witnesses.reports import Verdict, WitnessReport, closed_pairing_certificate

logger = logging.getLogger(__name__)

Y_EXTENT = 4.0
Z_MIN = -1.0
Z_MAX = 4.0
NODES_PER_UNIT = 64
SAMPLED_EXPONENTS = (1.5, 2.0, 4.0)
TRANSLATION = 3.0
PAIRING_TOLERANCE = 1e-6
TAIL_TOLERANCE = 1e-6


def k_profile(z):
    return smooth_step(z)


def k_profile_derivative(z):
    return smooth_step_derivative(z)


def h1_profile(y):
    return smooth_step(2.0 * y) * smooth_step(2.0 - 2.0 * y)


def h1_derivative(y):
    return 2.0 * (
        smooth_step_derivative(2.0 * y) * smooth_step(2.0 - 2.0 * y)
        - smooth_step(2.0 * y) * smooth_step_derivative(2.0 - 2.0 * y)
    )


def h2_profile(y):
    return smooth_step(2.0 * y + 2.0) * (1.0 - smooth_step(2.0 * y))


def h2_derivative(y):
    return 2.0 * (
        smooth_step_derivative(2.0 * y + 2.0) * (1.0 - smooth_step(2.0 * y))
        - smooth_step(2.0 * y + 2.0) * smooth_step_derivative(2.0 * y)
    )


def normalization() -> float:
    """``c`` with ``c * int k k' dz * int (h1' h2 - h1 h2') dy = 1``.

    ``int k k' = 1/2``; the y-integral equals 1 for these profiles, so c = 2
    up to quadrature error.
    """
    y_part = integrate.quad(
        lambda y: float(
            h1_derivative(y) * h2_profile(y) - h1_profile(y) * h2_derivative(y)
        ),
        0.0,
        0.5,
        epsabs=1e-14,
        epsrel=1e-13,
    )[0]
    return 1.0 / (0.5 * y_part)


def _witness_function(
    domain: ChartDomain, h, dh, scale: float, shift: float, label: str
) -> DifferentialForm:
    """``scale * h(y - shift) k(z)`` with its exact differential attached."""

    def value(y, z):
        return scale * h(y - shift) * k_profile(z)

    def dy(y, z):
        return scale * dh(y - shift) * k_profile(z)

    def dz(y, z):
        return scale * h(y - shift) * k_profile_derivative(z)

    differential = analytic_form(1, domain, [dy, dz], zero_form(2, domain), f"d{label}")
    return analytic_form(0, domain, [value], differential, label)


@dataclass(frozen=True, eq=False)
class HyperbolicWitnesses:
    f: DifferentialForm
    g: DifferentialForm
    scale: float
    report: WitnessReport


def halfplane_grid(
    z_max: float = Z_MAX,
    y_extent: float = Y_EXTENT,
    nodes_per_unit: int = NODES_PER_UNIT,
) -> Grid:
    domain = ChartDomain.halfplane(y_extent, Z_MIN, z_max)
    return build_grid(
        domain,
        (
            int(round(2 * y_extent * nodes_per_unit)) + 1,
            int(round((z_max - Z_MIN) * nodes_per_unit)) + 1,
        ),
    )


def differential_tail(
    grid: Grid, dh, scale: float, r: float, shift: float = 0.0
) -> float:
    """Bound for ``int_{z > Z} |d(scale h k)|^r dvol``.

    Above z = 1 the differential is ``scale h'(y) dy`` with pointwise norm
    ``e^{-z} |scale h'|``, so the tail is
    ``e^{(1-r) Z} / (r - 1) * int |scale h'|^r dy``.
    """
    z_max = grid.domain.bounds[1][1]
    y_nodes = grid.axes[0]
    h_y = float(y_nodes[1] - y_nodes[0])
    weights = trapezoid_weights(y_nodes.size, h_y)
    y_mass = float(np.sum(weights * np.abs(scale * dh(y_nodes - shift)) ** r))
    return math.exp((1.0 - r) * z_max) / (r - 1.0) * y_mass


def _differential_norm(
    form: DifferentialForm,
    grid: Grid,
    metric: DiagonalMetric,
    dh,
    scale: float,
    r: float,
) -> float:
    tail = differential_tail(grid, dh, scale, r)
    differential = form.differential
    assert differential is not None
    return lp_norm(differential, metric, grid, r, tail=tail).total


def hyperbolic_witnesses(
    exponents: Sequence[float] = SAMPLED_EXPONENTS,
    nodes_per_unit: int = NODES_PER_UNIT,
    z_max: float = Z_MAX,
) -> HyperbolicWitnesses:
    """Build f and g and verify their eight defining properties on a grid.

    The checks are nonnegativity, support of f and g, finite ``L^r`` norms of
    df and dg for the sampled r (with the analytic z-tail, stable under
    doubling Z), support and sign of ``df ^ dg``, the normalized pairing,
    bounded y-partials and compactly supported z-partials.
    """
    grid = halfplane_grid(z_max, nodes_per_unit=nodes_per_unit)
    doubled = halfplane_grid(2.0 * z_max, nodes_per_unit=nodes_per_unit)
    domain = grid.domain
    metric = DiagonalMetric.horocyclic()
    scale = normalization()
    f = _witness_function(domain, h1_profile, h1_derivative, scale, 0.0, "f")
    g = _witness_function(domain, h2_profile, h2_derivative, 1.0, 0.0, "g")
    f2 = _witness_function(doubled.domain, h1_profile, h1_derivative, scale, 0.0, "f")
    g2 = _witness_function(doubled.domain, h2_profile, h2_derivative, 1.0, 0.0, "g")
    df, dg = f.differential, g.differential
    assert df is not None and dg is not None

    points = grid.points
    y, z = points[:, 0], points[:, 1]
    fv, gv = f(points)[0], g(points)[0]
    outside = (z <= 0.0) | (np.abs(y) >= 1.0)
    density = top_coefficient(df, dg, points)
    active = np.abs(density) > 1e-14
    dfv, dgv = df(points), dg(points)
    y_partials = np.concatenate([dfv[0], dgv[0]])
    z_partials = np.abs(np.concatenate([dfv[1], dgv[1]]))
    z_both = np.concatenate([z, z])

    norms: Dict[str, float] = {}
    tails_stable = True
    for r in exponents:
        for name, form, form2, dh, c in (
            ("df", f, f2, h1_derivative, scale),
            ("dg", g, g2, h2_derivative, 1.0),
        ):
            value = _differential_norm(form, grid, metric, dh, c, r)
            value2 = _differential_norm(form2, doubled, metric, dh, c, r)
            norms[f"{name}_L{r:g}"] = value
            tails_stable &= abs(value - value2) <= TAIL_TOLERANCE * max(1.0, value)
    pairing = pairing_integral(df, dg, grid)
    finite = all(math.isfinite(v) for v in norms.values())
    checks = {
        "nonnegative": bool(np.all(fv >= 0.0) and np.all(gv >= 0.0)),
        "support": bool(np.all(fv[outside] == 0.0) and np.all(gv[outside] == 0.0)),
        "differentials_in_Lr": finite and tails_stable,
        "wedge_support": bool(
            np.all((np.abs(y[active]) <= 1.0) & (z[active] >= 0.0) & (z[active] <= 1.0))
        ),
        "wedge_nonnegative": bool(np.min(density) >= -1e-12),
        "pairing_normalized": abs(pairing - 1.0) <= PAIRING_TOLERANCE,
        "y_partials_bounded": bool(np.all(np.isfinite(y_partials))),
        "z_partials_compact": bool(
            np.all(z_partials[(z_both < 0.0) | (z_both > 1.0)] <= 1e-14)
        ),
    }
    report = WitnessReport(
        "hyperbolic_witnesses",
        {
            "y_extent": Y_EXTENT,
            "z_range": [Z_MIN, z_max],
            "nodes_per_unit": nodes_per_unit,
            "exponents": list(exponents),
        },
        Verdict.LOWER_BOUND if all(checks.values()) else Verdict.INCONCLUSIVE,
        pairings={"df_dg": pairing},
        norms={
            **norms,
            "scale": scale,
            "wedge_min": float(np.min(density)),
            "y_partial_sup": float(np.max(np.abs(y_partials))),
        },
        checks=checks,
        tolerances={"pairing": PAIRING_TOLERANCE, "tail": TAIL_TOLERANCE},
    )
    logger.info("Hyperbolic witnesses: pairing %.9f, checks %s", pairing, checks)
    return HyperbolicWitnesses(f, g, scale, report)


def _closedness_defect(form: DifferentialForm, points: np.ndarray) -> float:
    """Numerical ``d`` of a 1-form with its attached differential stripped."""
    bare = DifferentialForm(
        form.degree, form.domain, form.evaluator, Representation.LAZY
    )
    return float(np.max(np.abs(exterior_derivative(bare)(points))))


def hyperbolic_nonvanishing(
    p: ExponentLike,
    q: ExponentLike,
    nodes_per_unit: int = NODES_PER_UNIT,
) -> WitnessReport:
    """Certificate that ``[df]`` is a nonzero reduced class.

    ``gamma = dg`` must be closed with finite ``L^{p'}`` and ``L^{q'}`` norms
    and pair nontrivially with ``alpha = df``. The same witness translated by
    3 in y pairs to zero with alpha, which is evidence for independent
    classes along the isometry orbit.

    Raises:
        PreconditionError: Unless ``1 < p, q < inf``.
    """
    pair = ExponentPair.of(p, q)
    for name, value in (("p", pair.p), ("q", pair.q)):
        if not 1.0 < value < math.inf:
            raise PreconditionError(f"Nonvanishing certificate needs 1 < {name} < inf")
    grid = halfplane_grid(nodes_per_unit=nodes_per_unit)
    metric = DiagonalMetric.horocyclic()
    scale = normalization()
    f = _witness_function(grid.domain, h1_profile, h1_derivative, scale, 0.0, "f")
    g = _witness_function(grid.domain, h2_profile, h2_derivative, 1.0, 0.0, "g")
    moved = _witness_function(
        grid.domain, h2_profile, h2_derivative, 1.0, TRANSLATION, "g_shifted"
    )
    alpha, gamma, gamma_moved = f.differential, g.differential, moved.differential
    assert alpha is not None and gamma is not None and gamma_moved is not None

    norms = {
        "alpha_Lp": lp_norm(
            alpha,
            metric,
            grid,
            pair.p,
            differential_tail(grid, h1_derivative, scale, pair.p),
        ).total,
        "gamma_Lp'": lp_norm(
            gamma,
            metric,
            grid,
            pair.p_conjugate,
            differential_tail(grid, h2_derivative, 1.0, pair.p_conjugate),
        ).total,
        "gamma_Lq'": lp_norm(
            gamma,
            metric,
            grid,
            pair.q_conjugate,
            differential_tail(grid, h2_derivative, 1.0, pair.q_conjugate),
        ).total,
    }
    rng = np.random.default_rng(0)
    probes = np.column_stack([rng.uniform(-1.5, 1.5, 200), rng.uniform(-0.5, 2.0, 200)])
    defect = _closedness_defect(gamma, probes)
    pairing = pairing_integral(alpha, gamma, grid)
    translated = pairing_integral(alpha, gamma_moved, grid)
    checks = closed_pairing_certificate(
        pairing,
        defect <= 1e-6,
        {k: v for k, v in norms.items() if k != "alpha_Lp"},
        PAIRING_TOLERANCE,
    )
    checks["alpha_in_Lp"] = math.isfinite(norms["alpha_Lp"])
    checks["translated_pairing_zero"] = abs(translated) <= 1e-14
    verdict = (
        Verdict.REDUCED_NONVANISHING if all(checks.values()) else Verdict.INCONCLUSIVE
    )
    return WitnessReport(
        "hyperbolic_nonvanishing",
        {
            "p": pair.p,
            "q": pair.q,
            "nodes_per_unit": nodes_per_unit,
            "shift": TRANSLATION,
        },
        verdict,
        pairings={"alpha_gamma": pairing, "alpha_translated_gamma": translated},
        norms={**norms, "closedness_defect": defect},
        checks=checks,
        tolerances={"pairing": PAIRING_TOLERANCE, "closedness": 1e-6},
        notes=[
            "translated witnesses have disjoint supports; isometries of H^2 give "
            "infinitely many such pairs"
        ],
    )

