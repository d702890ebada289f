"""Model chart domains."""

import json
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from lqplab.errors import GeometryError

logger = logging.getLogger(__name__)

DOMAIN_KINDS = ("interval", "circle", "torus", "ball", "halfplane", "box")


@dataclass(frozen=True)
class ChartDomain:
    """A single-chart model domain.

    Every domain is described by a coordinate box ``bounds`` (per axis
    ``(lo, hi)``) and per-axis periodicity. Balls additionally carry their
    radius; the coordinate box of a ball is its bounding cube. The horocyclic
    half-plane is truncated to ``[-Y, Y] x [z_min, z_max]``.
    """

    kind: str
    dim: int
    bounds: Tuple[Tuple[float, float], ...]
    periodic: Tuple[bool, ...]
    radius: float = 1.0

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise GeometryError(f"Unknown domain kind '{self.kind}'")
        if self.dim < 1:
            raise GeometryError("Domain dimension must be a positive integer")
        if len(self.bounds) != self.dim or len(self.periodic) != self.dim:
            raise GeometryError(
                f"{self.kind} domain of dimension {self.dim} needs {self.dim} "
                f"axis bounds, got {len(self.bounds)}"
            )
        for lo, hi in self.bounds:
            if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
                raise GeometryError(f"Axis bounds must be finite and ordered: {lo, hi}")
        if self.kind in ("interval", "circle") and self.dim != 1:
            raise GeometryError(f"{self.kind} domains have dimension 1")
        if self.kind == "halfplane":
            if self.dim != 2:
                raise GeometryError("The horocyclic half-plane has dimension 2")
            z_min, z_max = self.bounds[1]
            if not z_min <= 0.0 < z_max:
                raise GeometryError("Half-plane truncation needs z_min <= 0 < z_max")

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------
    @classmethod
    def interval(cls, a: float, b: float) -> "ChartDomain":
        return cls("interval", 1, ((float(a), float(b)),), (False,))

    @classmethod
    def circle(cls, length: float = 2 * math.pi) -> "ChartDomain":
        return cls("circle", 1, ((0.0, float(length)),), (True,))

    @classmethod
    def torus(cls, lengths: Sequence[float]) -> "ChartDomain":
        lengths = tuple(float(x) for x in lengths)
        return cls(
            "torus",
            len(lengths),
            tuple((0.0, length) for length in lengths),
            (True,) * len(lengths),
        )

    @classmethod
    def ball(cls, n: int, radius: float = 1.0) -> "ChartDomain":
        if radius <= 0:
            raise GeometryError("Ball radius must be positive")
        return cls(
            "ball", int(n), ((-radius, radius),) * int(n), (False,) * int(n), radius
        )

    @classmethod
    def halfplane(
        cls, y_extent: float, z_min: float, z_max: float
    ) -> "ChartDomain":
        """Truncated horocyclic half-plane ``[-Y, Y] x [z_min, z_max]``."""
        if y_extent <= 0:
            raise GeometryError("Half-plane truncation Y must be positive")
        return cls(
            "halfplane",
            2,
            ((-float(y_extent), float(y_extent)), (float(z_min), float(z_max))),
            (False, False),
        )

    @classmethod
    def box(cls, bounds: Sequence[Tuple[float, float]]) -> "ChartDomain":
        bounds = tuple((float(lo), float(hi)) for lo, hi in bounds)
        return cls("box", len(bounds), bounds, (False,) * len(bounds))

    # ------------------------------------------------------------------
    # properties
    # ------------------------------------------------------------------
    @property
    def lengths(self) -> Tuple[float, ...]:
        return tuple(hi - lo for lo, hi in self.bounds)

    @property
    def is_closed(self) -> bool:
        """True for compact domains without boundary (circle, torus)."""
        return all(self.periodic)

    @property
    def has_finite_volume(self) -> bool:
        """The half-plane is a truncation of an infinite-volume manifold."""
        return self.kind != "halfplane"

    @property
    def singular_point(self) -> Optional[np.ndarray]:
        """Designated point for radial grading (the centre of a ball)."""
        if self.kind == "ball":
            return np.zeros(self.dim)
        return None

    @property
    def diameter(self) -> float:
        if self.kind == "ball":
            return 2.0 * self.radius
        return float(np.sqrt(sum(length**2 for length in self.lengths)))

    def contains(self, points: np.ndarray, strict: bool = False) -> np.ndarray:
        """Boolean mask of points lying in the domain.

        Periodic axes accept every coordinate value.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == "ball":
            r = np.linalg.norm(pts, axis=1)
            return r < self.radius if strict else r <= self.radius
        mask = np.ones(pts.shape[0], dtype=bool)
        for axis, ((lo, hi), periodic) in enumerate(zip(self.bounds, self.periodic)):
            if periodic:
                continue
            x = pts[:, axis]
            mask &= (x > lo) & (x < hi) if strict else (x >= lo) & (x <= hi)
        return mask

    # ------------------------------------------------------------------
    # serialization
    # ------------------------------------------------------------------
    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "dim": self.dim,
            "bounds": [list(b) for b in self.bounds],
            "periodic": list(self.periodic),
            "radius": self.radius,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ChartDomain":
        return cls(
            data["kind"],
            int(data["dim"]),
            tuple((float(lo), float(hi)) for lo, hi in data["bounds"]),
            tuple(bool(p) for p in data["periodic"]),
            float(data.get("radius", 1.0)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)
