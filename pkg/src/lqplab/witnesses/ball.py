"""Nonvanishing witness for L_{q,p}-cohomology of the unit ball.

In polar coordinates (r, psi) on the disc the witness is built from the
sphere forms ``theta = sin psi`` and ``phi = cos psi / pi``
(``int phi d theta = 1``):

* ``alpha = d(r^mu theta) = d(r^{mu-1} y)``, in ``L^p`` iff
  ``p (mu - 1) + 2 > 0``;
* ``gamma_t = h_t(r) r^{-(mu+1)} phi dr``, with the plateau profile
  ``h_t = 1/|log 2t|`` on ``[2t, 1 - 2t]`` and smooth ramps of width
  ``tau t`` just outside it, so ``h_t`` vanishes outside ``(t, 1 - t)``.

Both the pairing ``int alpha ^ gamma_t`` and the norms of ``d gamma_t``
separate into an angular factor and a radial integral; the radial integrals
are evaluated in closed form on the plateau and by adaptive quadrature on
the ramps.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from scipy import integrate
from scipy.special import beta as beta_function

from lqplab.errors import EmptyMuInterval, PreconditionError
from lqplab.forms.form import DifferentialForm, analytic_form, zero_form
from lqplab.forms.norms import lp_norm
from lqplab.geometry import ChartDomain, DiagonalMetric, build_grid
from lqplab.geometry.exponents import ExponentLike, ExponentPair
from lqplab.profiles import smooth_step
from lqplab.witnesses.reports import Verdict, WitnessReport, sequence_certificate

logger = logging.getLogger(__name__)

DEFAULT_T_LADDER = (1e-2, 1e-3, 1e-4)
DEFAULT_RAMP = 1e-3
STABILITY_TOLERANCE = 1e-4
PAIRING_FLOOR = 0.5


def mu_interval(n: int, k: int, pair: ExponentPair) -> Tuple[float, float]:
    """``(k - n/p, k - 1 - n/q)``; nonempty iff ``1/p - 1/q > 1/n``."""
    return (k - n * float(pair.inv_p), k - 1 - n * float(pair.inv_q))


@dataclass(frozen=True)
class BallWitnessConfig:
    """Parameters of the ball witness.

    ``mu`` defaults to the midpoint of the admissible interval and
    ``grading`` to ``max(1, 1/beta)`` with ``beta = p (mu - 1) + 2``, which
    makes the graded radial integrand of ``|alpha|^p`` bounded.
    """

    p: float
    q: float
    n: int = 2
    k: int = 1
    mu: Optional[float] = None
    t_ladder: Tuple[float, ...] = DEFAULT_T_LADDER
    ramp: float = DEFAULT_RAMP
    radial_nodes: int = 32
    angular_nodes: int = 64
    grading: Optional[float] = None

    def __post_init__(self):
        pair = ExponentPair.of(self.p, self.q)
        low, high = mu_interval(self.n, self.k, pair)
        if not low < high:
            raise EmptyMuInterval(
                f"No mu in ({low:g}, {high:g}): 1/p - 1/q must exceed 1/{self.n}",
                (low, high),
            )
        if (self.n, self.k) != (2, 1):
            raise PreconditionError("Ball witnesses are built for n = 2, k = 1")
        if math.isinf(pair.p) or math.isinf(pair.q):
            raise PreconditionError("Ball witnesses need finite p and q")
        mu = 0.5 * (low + high) if self.mu is None else float(self.mu)
        if not low < mu < high:
            raise PreconditionError(f"mu = {mu:g} outside ({low:g}, {high:g})")
        ladder = tuple(float(t) for t in self.t_ladder)
        if not ladder or any(not 0.0 < t < 0.25 for t in ladder):
            raise PreconditionError("t-ladder entries must lie in (0, 1/4)")
        if any(b >= a for a, b in zip(ladder, ladder[1:])):
            raise PreconditionError("t-ladder must be strictly decreasing")
        if not 0.0 < self.ramp < 1.0:
            raise PreconditionError("Ramp width factor must lie in (0, 1)")
        beta = pair.p * (mu - 1.0) + 2.0
        grading = max(1.0, 1.0 / beta) if self.grading is None else float(self.grading)
        object.__setattr__(self, "p", pair.p)
        object.__setattr__(self, "q", pair.q)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "t_ladder", ladder)
        object.__setattr__(self, "grading", grading)

    @property
    def pair(self) -> ExponentPair:
        return ExponentPair.of(self.p, self.q)

    @property
    def interval(self) -> Tuple[float, float]:
        return mu_interval(self.n, self.k, self.pair)

    @property
    def beta(self) -> float:
        """Radial exponent ``p (mu - k) + n``.

        ``|alpha|^p r^{n-1}`` behaves like ``r^{beta-1}`` at the centre.
        """
        assert self.mu is not None
        return self.p * (self.mu - self.k) + self.n

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["t_ladder"] = list(self.t_ladder)
        data["interval"] = list(self.interval)
        return data


def alpha_form(mu: float) -> DifferentialForm:
    """``d(r^{mu-1} y)`` in Cartesian components, exact differential zero."""
    domain = ChartDomain.ball(2)

    def dx(x, y):
        r2 = x * x + y * y
        return (mu - 1.0) * r2 ** ((mu - 3.0) / 2.0) * x * y

    def dy(x, y):
        r2 = x * x + y * y
        return r2 ** ((mu - 1.0) / 2.0) + (mu - 1.0) * r2 ** ((mu - 3.0) / 2.0) * y * y

    return analytic_form(1, domain, [dx, dy], zero_form(2, domain), f"d(r^{mu:g} sin)")


def angular_power(mu: float, p: float) -> float:
    """``int_0^{2 pi} (mu^2 sin^2 + cos^2)^{p/2} d psi``."""
    return integrate.quad(
        lambda s: (mu * mu * math.sin(s) ** 2 + math.cos(s) ** 2) ** (p / 2.0),
        0.0,
        2.0 * math.pi,
        epsabs=1e-13,
        epsrel=1e-12,
        limit=200,
    )[0]


def abs_trig_power(s: float) -> float:
    """``int_0^{2 pi} |sin psi|^s d psi = 2 B(1/2, (s + 1)/2)``."""
    return 2.0 * float(beta_function(0.5, 0.5 * (s + 1.0)))


def alpha_norm_exact(mu: float, p: float) -> float:
    beta = p * (mu - 1.0) + 2.0
    return (angular_power(mu, p) / beta) ** (1.0 / p)


def plateau_height(t: float) -> float:
    return 1.0 / abs(math.log(2.0 * t))


def plateau_profile(t: float, ramp: float):
    """``h_t`` as a scalar function of r."""
    height = plateau_height(t)
    width = ramp * t
    lo, hi = 2.0 * t, 1.0 - 2.0 * t

    def h(r: float) -> float:
        if lo <= r <= hi:
            return height
        if lo - width < r < lo:
            return height * float(smooth_step((r - lo + width) / width))
        if hi < r < hi + width:
            return height * float(smooth_step((hi + width - r) / width))
        return 0.0

    return h


def radial_moment(t: float, ramp: float, power: float, exponent: float) -> float:
    """``int_0^1 h_t(r)^power r^exponent dr``."""
    height = plateau_height(t)
    lo, hi = 2.0 * t, 1.0 - 2.0 * t
    if exponent == -1.0:
        plateau = math.log(hi) - math.log(lo)
    else:
        e1 = exponent + 1.0
        plateau = (hi**e1 - lo**e1) / e1
    h = plateau_profile(t, ramp)
    width = ramp * t

    def integrand(r: float) -> float:
        return h(r) ** power * r**exponent

    ramps = integrate.quad(integrand, lo - width, lo, epsabs=1e-15, epsrel=1e-12)[0]
    ramps += integrate.quad(integrand, hi, hi + width, epsabs=1e-15, epsrel=1e-12)[0]
    return height**power * plateau + ramps


def pairing_value(t: float, ramp: float) -> float:
    """``int alpha ^ gamma_t = -int h_t(r) / r dr`` with the polar orientation.

    The angular factor ``int cos^2 psi / pi d psi`` is one.
    """
    return -radial_moment(t, ramp, 1.0, -1.0)


def differential_norm(t: float, ramp: float, mu: float, q_conjugate: float) -> float:
    """``||d gamma_t||_{q'}``; ``|d gamma_t| = h_t r^{-mu-2} |sin psi| / pi``."""
    s = q_conjugate
    angular = abs_trig_power(s) / math.pi**s
    radial = radial_moment(t, ramp, s, (-mu - 2.0) * s + 1.0)
    return (angular * radial) ** (1.0 / s)


def gamma_norm(t: float, ramp: float, mu: float, p_conjugate: float) -> float:
    """``||gamma_t||_{p'}``; ``|gamma_t| = h_t r^{-mu-1} |cos psi| / pi``."""
    s = p_conjugate
    angular = abs_trig_power(s) / math.pi**s
    radial = radial_moment(t, ramp, s, (-mu - 1.0) * s + 1.0)
    return (angular * radial) ** (1.0 / s)


def _alpha_quadrature(config: BallWitnessConfig, radial_nodes: int) -> float:
    assert config.mu is not None
    grid = build_grid(
        ChartDomain.ball(2), (radial_nodes, config.angular_nodes), config.grading
    )
    return lp_norm(
        alpha_form(config.mu), DiagonalMetric.euclidean(2), grid, config.p
    ).value


def ball_witness(config: BallWitnessConfig) -> WitnessReport:
    """Run the three steps of the ball witness and emit a verdict.

    Step one checks ``alpha`` in ``L^p`` (graded quadrature against the exact
    norm and stable under doubling the radial nodes). Step two tracks the
    pairings along the t-ladder, which approach -1. Step three checks that
    ``||d gamma_t||_{q'}`` decreases to zero. ``||gamma_t||_{p'}`` is reported
    without a verdict.
    """
    assert config.mu is not None
    mu, pair = config.mu, config.pair
    exact = alpha_norm_exact(mu, config.p)
    coarse = _alpha_quadrature(config, config.radial_nodes)
    fine = _alpha_quadrature(config, 2 * config.radial_nodes)
    pairings: List[float] = [pairing_value(t, config.ramp) for t in config.t_ladder]
    d_norms = [
        differential_norm(t, config.ramp, mu, pair.q_conjugate) for t in config.t_ladder
    ]
    g_norms = [
        gamma_norm(t, config.ramp, mu, pair.p_conjugate) for t in config.t_ladder
    ]
    checks = {
        "alpha_exponent": config.beta > 0.0,
        "alpha_quadrature": abs(coarse - exact) <= STABILITY_TOLERANCE * exact,
        "alpha_refinement_stable": abs(fine - coarse) <= STABILITY_TOLERANCE * exact,
    }
    checks.update(sequence_certificate(pairings, d_norms, PAIRING_FLOOR))
    verdict = Verdict.NONVANISHING if all(checks.values()) else Verdict.INCONCLUSIVE
    logger.info(
        "Ball witness p=%g q=%g mu=%g: pairings %s, |d gamma| %s",
        config.p,
        config.q,
        mu,
        pairings,
        d_norms,
    )
    return WitnessReport(
        "ball_witness",
        config.to_dict(),
        verdict,
        pairings={
            **{f"t={t:g}": abs(v) for t, v in zip(config.t_ladder, pairings)},
            **{f"signed_t={t:g}": v for t, v in zip(config.t_ladder, pairings)},
        },
        norms={
            "alpha_Lp_exact": exact,
            "alpha_Lp_quadrature": coarse,
            "alpha_Lp_refined": fine,
            **{f"d_gamma_Lq'_t={t:g}": v for t, v in zip(config.t_ladder, d_norms)},
            **{f"gamma_Lp'_t={t:g}": v for t, v in zip(config.t_ladder, g_norms)},
        },
        ratio=d_norms[-1] / d_norms[0],
        checks=checks,
        tolerances={
            "alpha_relative": STABILITY_TOLERANCE,
            "pairing_floor": PAIRING_FLOOR,
        },
        notes=[
            "gamma_t L^{p'} norms are reported without a reduced-cohomology verdict"
        ],
    )


def ball_witness_for(
    p: ExponentLike, q: ExponentLike, t_ladder: Sequence[float] = DEFAULT_T_LADDER
) -> WitnessReport:
    pair = ExponentPair.of(p, q)
    return ball_witness(BallWitnessConfig(pair.p, pair.q, t_ladder=tuple(t_ladder)))
