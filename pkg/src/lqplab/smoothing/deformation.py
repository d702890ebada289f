"""The radial diffeomorphism of a ball onto R^n and the deformations s_v.

On the unit ball the profile is ``phi(r) = r`` for ``r < 1/3`` and
``phi(r) = exp(1 / (1 - r^2))`` for ``r >= 2/3``; in between it blends the
two, either with the smooth step (default) or with the quintic Hermite
interpolant matching value and two derivatives at both ends. The map
``h(x) = phi(|x|) x / |x|`` sends the open ball onto R^n and

    s_v(x) = h^{-1}(h(x) + v)     for |x| < 1,      s_v(x) = x otherwise.

A deformation centred on B(c, R) conjugates this by ``x -> (x - c) / R``.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import BPoly

from lqplab.errors import GeometryError, RootFindingError
from lqplab.forms.pullback import ChartMap
from lqplab.profiles import smooth_step, smooth_step_derivative

logger = logging.getLogger(__name__)

INNER = 1.0 / 3.0
OUTER = 2.0 / 3.0
# exp(1/(1 - r^2)) overflows beyond this exponent; s_v is the identity there
# to double precision for every bounded shift.
MAX_EXPONENT = 700.0
TRANSITIONS = ("smooth", "quintic")


def _row_norm(z: np.ndarray) -> np.ndarray:
    """Euclidean norm of each row, scaled by its largest entry so squares of
    values near the overflow threshold stay finite."""
    top = np.max(np.abs(z), axis=1)
    safe = np.where(top > 0, top, 1.0)
    return top * np.linalg.norm(z / safe[:, None], axis=1)


def _outer(r: np.ndarray) -> np.ndarray:
    return np.exp(1.0 / (1.0 - r**2))


def _outer_d1(r: np.ndarray) -> np.ndarray:
    a = 1.0 - r**2
    return _outer(r) * 2.0 * r / a**2


def _outer_d2(r: np.ndarray) -> np.ndarray:
    a = 1.0 - r**2
    return _outer(r) * (4.0 * r**2 / a**4 + (2.0 * a + 8.0 * r**2) / a**3)


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Strictly increasing profile ``phi: [0, 1) -> [0, inf)``."""

    transition: str = "smooth"
    _quintic: Optional[BPoly] = field(default=None, repr=False)

    def __post_init__(self):
        if self.transition not in TRANSITIONS:
            raise GeometryError(f"Unknown transition '{self.transition}'")
        if self.transition == "quintic":
            ends = np.array([INNER, OUTER])
            right = np.array([OUTER])
            poly = BPoly.from_derivatives(
                ends,
                [
                    [INNER, 1.0, 0.0],
                    [
                        float(_outer(right)[0]),
                        float(_outer_d1(right)[0]),
                        float(_outer_d2(right)[0]),
                    ],
                ],
            )
            nodes = np.linspace(INNER, OUTER, 2001)
            if not np.all(poly.derivative()(nodes) > 0):
                raise GeometryError("Quintic transition is not monotone")
            object.__setattr__(self, "_quintic", poly)

    def _band(self, r: np.ndarray, derivative: int) -> np.ndarray:
        if self._quintic is not None:
            poly = self._quintic if derivative == 0 else self._quintic.derivative()
            return poly(r)
        t = 3.0 * r - 1.0
        s = smooth_step(t)
        e = _outer(r)
        if derivative == 0:
            return (1.0 - s) * r + s * e
        ds = 3.0 * smooth_step_derivative(t)
        return (1.0 - s) + s * _outer_d1(r) + ds * (e - r)

    def _evaluate(self, r, derivative: int) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        out = np.empty_like(r)
        inner = r < INNER
        outer = r >= OUTER
        band = ~inner & ~outer
        out[inner] = r[inner] if derivative == 0 else 1.0
        with np.errstate(over="ignore", divide="ignore"):
            out[outer] = (_outer if derivative == 0 else _outer_d1)(r[outer])
        out[band] = self._band(r[band], derivative)
        return out

    def __call__(self, r) -> np.ndarray:
        return self._evaluate(r, 0)

    def derivative(self, r) -> np.ndarray:
        return self._evaluate(r, 1)

    @property
    def band_top(self) -> float:
        return float(_outer(np.array(OUTER)))

    def inverse(
        self, sigma, tol: float = 1e-14, max_iterations: int = 200
    ) -> np.ndarray:
        """Solve ``phi(r) = sigma`` for ``sigma >= 0``.

        Closed forms outside the transition band; inside it a vectorized
        bisection on ``[1/3, 2/3]`` polished by Newton steps.

        Raises:
            RootFindingError: If the band solve fails, with its bracket.
        """
        sigma = np.asarray(sigma, dtype=float)
        if np.any(sigma < 0) or not np.all(np.isfinite(sigma)):
            raise GeometryError("Profile inverse needs finite nonnegative values")
        out = np.empty_like(sigma)
        low = sigma < INNER
        high = sigma >= self.band_top
        band = ~low & ~high
        out[low] = sigma[low]
        out[high] = np.sqrt(1.0 - 1.0 / np.log(sigma[high]))
        if np.any(band):
            target = sigma[band]
            lo = np.full(target.shape, INNER)
            hi = np.full(target.shape, OUTER)
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                below = self(mid) < target
                lo = np.where(below, mid, lo)
                hi = np.where(below, hi, mid)
            r = 0.5 * (lo + hi)
            for _ in range(max_iterations):
                step = (self(r) - target) / self.derivative(r)
                r = np.clip(r - step, INNER, OUTER)
                if np.all(np.abs(step) <= tol):
                    break
            residual = np.abs(self(r) - target) / np.maximum(target, 1.0)
            if not np.all(residual <= 1e-12):
                raise RootFindingError(
                    f"Radial inverse failed, worst residual {np.max(residual):.3e}",
                    (INNER, OUTER),
                )
            out[band] = r
        return out


@dataclass(frozen=True, eq=False)
class DeRhamDeformation:
    """Deformations ``s_v`` supported in the ball B(center, radius)."""

    center: np.ndarray
    radius: float = 1.0
    profile: RadialProfile = field(default_factory=RadialProfile)

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).ravel())
        if self.radius <= 0:
            raise GeometryError("Deformation radius must be positive")

    @classmethod
    def unit(cls, n: int, transition: str = "smooth") -> "DeRhamDeformation":
        return cls(np.zeros(n), 1.0, RadialProfile(transition))

    @property
    def dim(self) -> int:
        return self.center.size

    def local(self, points: np.ndarray) -> np.ndarray:
        return (np.atleast_2d(points) - self.center) / self.radius

    def inside(self, points: np.ndarray) -> np.ndarray:
        """Points where ``s_v`` can move: strictly inside and below overflow."""
        r = np.linalg.norm(self.local(points), axis=1)
        with np.errstate(divide="ignore"):
            exponent = np.where(r < 1.0, 1.0 / (1.0 - r**2), np.inf)
        return exponent < MAX_EXPONENT

    def h(self, y: np.ndarray) -> np.ndarray:
        """``h`` on local coordinates inside the unit ball."""
        r = np.linalg.norm(y, axis=1)
        scale = np.ones_like(r)
        moved = r >= INNER
        scale[moved] = self.profile(r[moved]) / r[moved]
        return y * scale[:, None]

    def h_inverse(self, z: np.ndarray) -> np.ndarray:
        sigma = _row_norm(z)
        scale = np.ones_like(sigma)
        moved = sigma >= INNER
        scale[moved] = self.profile.inverse(sigma[moved]) / sigma[moved]
        return z * scale[:, None]

    def dh(self, y: np.ndarray) -> np.ndarray:
        """Jacobian ``(phi/r) I + (phi' - phi/r) u u^T``, shape (M, n, n)."""
        n = y.shape[1]
        r = np.linalg.norm(y, axis=1)
        out = np.broadcast_to(np.eye(n), (y.shape[0], n, n)).copy()
        moved = r >= INNER
        if np.any(moved):
            rm = r[moved]
            u = y[moved] / rm[:, None]
            ratio = self.profile(rm) / rm
            radial = self.profile.derivative(rm) - ratio
            out[moved] = ratio[:, None, None] * np.eye(n) + radial[
                :, None, None
            ] * np.einsum("ma,mb->mab", u, u)
        return out

    def apply(self, points: np.ndarray, shifts: np.ndarray) -> np.ndarray:
        """``s_v(x)`` with one shift per point (or one shift for all)."""
        x = np.atleast_2d(np.asarray(points, dtype=float))
        v = np.broadcast_to(np.asarray(shifts, dtype=float), x.shape)
        out = x.copy()
        mask = self.inside(x)
        if np.any(mask):
            y = self.local(x[mask])
            w = self.h_inverse(self.h(y) + v[mask])
            out[mask] = self.center + self.radius * w
        return out

    def jacobian(self, points: np.ndarray, shifts: np.ndarray) -> np.ndarray:
        """``D s_v(x) = Dh(w)^{-1} Dh(y)`` inside the ball, identity outside."""
        x = np.atleast_2d(np.asarray(points, dtype=float))
        n = x.shape[1]
        v = np.broadcast_to(np.asarray(shifts, dtype=float), x.shape)
        out = np.broadcast_to(np.eye(n), (x.shape[0], n, n)).copy()
        mask = self.inside(x)
        if np.any(mask):
            y = self.local(x[mask])
            w = self.h_inverse(self.h(y) + v[mask])
            out[mask] = np.linalg.solve(self.dh(w), self.dh(y))
        return out


class DeformationMap(ChartMap):
    """``s_v`` as a chart self-map, with one shift per evaluation point or a
    single shift broadcast to all points."""

    def __init__(self, deformation: DeRhamDeformation, shifts: np.ndarray):
        self.deformation = deformation
        self.shifts = np.asarray(shifts, dtype=float)
        self.dim = deformation.dim

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.deformation.apply(points, self.shifts)

    def jacobian(self, points: np.ndarray) -> np.ndarray:
        return self.deformation.jacobian(points, self.shifts)


def s_v_apply(
    x: np.ndarray, v: Sequence[float], deformation: DeRhamDeformation
) -> np.ndarray:
    """``s_v(x)`` for an array of points and one finite shift v."""
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise GeometryError("Shift must be finite")
    result = deformation.apply(x, v)
    logger.debug(
        "Applied s_v with |v| = %.3g to %d points",
        float(np.linalg.norm(v)),
        len(result),
    )
    return result


def continuity_defect(
    deformation: DeRhamDeformation,
    v: Sequence[float],
    count: int = 256,
    gap: float = 1e-3,
) -> float:
    """Largest jump of ``s_v`` across the sphere |x - c| = R on a ring of probes.

    Only implemented for planar deformations.
    """
    if deformation.dim != 2:
        raise GeometryError("Ring probes are planar")
    angles = 2.0 * math.pi * np.arange(count) / count
    ring = np.stack([np.cos(angles), np.sin(angles)], 1)
    inner = deformation.center + deformation.radius * (1.0 - gap) * ring
    outer = deformation.center + deformation.radius * (1.0 + gap) * ring
    moved_in = s_v_apply(inner, v, deformation) - inner
    moved_out = s_v_apply(outer, v, deformation) - outer
    return float(np.max(np.linalg.norm(moved_in - moved_out, axis=1)))
