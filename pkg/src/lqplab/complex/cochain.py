"""Finite cochain complexes with weighted norms, cohomology and torsion."""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from lqplab.errors import ComplexError

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-10
NILPOTENCY_TOLERANCE = 1e-12


def numerical_rank(matrix: np.ndarray, tol: float = RANK_TOLERANCE) -> int:
    """Rank with threshold ``tol * sigma_max``."""
    if matrix.size == 0:
        return 0
    sigma = np.linalg.svd(matrix, compute_uv=False)
    if sigma.size == 0 or sigma[0] == 0:
        return 0
    return int(np.sum(sigma > tol * sigma[0]))


@dataclass(frozen=True, eq=False)
class FiniteCochainComplex:
    """Levels ``F^0 .. F^N`` with maps ``D_k: F^k -> F^{k+1}``.

    ``matrices[k]`` has shape ``(m_{k+1}, m_k)``. Each level carries a
    positive weight vector; the level norm is the weighted l^p norm
    ``(sum_i w_i |x_i|^p)^{1/p}`` for whichever exponent an operation asks
    for.
    """

    matrices: Tuple[np.ndarray, ...]
    weights: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.matrices) + 1:
            raise ComplexError("Need one weight vector per level")
        dims = [w.size for w in self.weights]
        for k, d in enumerate(self.matrices):
            if d.shape != (dims[k + 1], dims[k]):
                raise ComplexError(
                    f"D_{k} has shape {d.shape}, expected {(dims[k + 1], dims[k])}"
                )
        for k, w in enumerate(self.weights):
            if not np.all(w > 0):
                raise ComplexError(f"Weights of level {k} must be strictly positive")
        for k in range(len(self.matrices) - 1):
            product = self.matrices[k + 1] @ self.matrices[k]
            scale = max(
                1.0,
                float(np.abs(self.matrices[k + 1]).max(initial=0.0))
                * float(np.abs(self.matrices[k]).max(initial=0.0)),
            )
            if product.size and np.abs(product).max() > NILPOTENCY_TOLERANCE * scale:
                raise ComplexError(f"D_{k + 1} D_{k} does not vanish")

    @classmethod
    def from_matrices(
        cls,
        matrices: Sequence[np.ndarray],
        weights: Optional[Sequence[np.ndarray]] = None,
    ) -> "FiniteCochainComplex":
        mats = tuple(np.atleast_2d(np.asarray(m, dtype=float)) for m in matrices)
        if not mats:
            raise ComplexError("A complex needs at least one map")
        dims = [mats[0].shape[1]] + [m.shape[0] for m in mats]
        if weights is None:
            ws = tuple(np.ones(d) for d in dims)
        else:
            ws = tuple(np.asarray(w, dtype=float).ravel() for w in weights)
        return cls(mats, ws)

    @property
    def top(self) -> int:
        return len(self.matrices)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(w.size for w in self.weights)

    def check_level(self, k: int) -> None:
        if not 0 <= k <= self.top:
            raise ComplexError(f"Level {k} outside 0..{self.top}")

    def differential(self, k: int) -> np.ndarray:
        """``D_k``, with zero maps out of the top level and into level 0."""
        dims = self.dims
        if k == -1:
            return np.zeros((dims[0], 0))
        if k == self.top:
            return np.zeros((0, dims[-1]))
        return self.matrices[k]


def closed_dimension(complex_: FiniteCochainComplex, k: int) -> int:
    d = complex_.differential(k)
    return complex_.dims[k] - numerical_rank(d)


def exact_dimension(complex_: FiniteCochainComplex, k: int) -> int:
    return numerical_rank(complex_.differential(k - 1))


def cohomology_dimension(complex_: FiniteCochainComplex, k: int) -> int:
    """``dim ker D_k - rank D_{k-1}``."""
    complex_.check_level(k)
    return closed_dimension(complex_, k) - exact_dimension(complex_, k)


@dataclass(frozen=True)
class TorsionReport:
    """Torsion of a finite complex at one level (always zero)."""

    level: int
    dimension: int
    closed_dimension: int
    exact_dimension: int
    cohomology_dimension: int

    @property
    def is_zero(self) -> bool:
        return self.dimension == 0


def torsion_check(complex_: FiniteCochainComplex, k: int) -> TorsionReport:
    """Torsion ``closure(B^k) / B^k`` of a finite complex.

    Finite-dimensional subspaces are closed, so the exact subspace equals its
    closure and the torsion vanishes; the report also records
    ``dim T <= dim H < inf``.
    """
    complex_.check_level(k)
    closed = closed_dimension(complex_, k)
    exact = exact_dimension(complex_, k)
    return TorsionReport(k, 0, closed, exact, closed - exact)


def random_complex(
    dims: Sequence[int],
    rng: np.random.Generator,
    ranks: Optional[Sequence[int]] = None,
    weighted: bool = True,
) -> FiniteCochainComplex:
    """Random complex with level dimensions ``dims``.

    ``D_{k+1}`` is built to annihilate the image of ``D_k``; ranks are drawn
    at random subject to ``r_k + r_{k+1} <= m_{k+1}`` unless given.
    """
    dims = [int(d) for d in dims]
    if len(dims) < 2:
        raise ComplexError("A complex needs at least two levels")
    if ranks is None:
        chosen = []
        previous = 0
        for k in range(len(dims) - 1):
            cap = min(dims[k] - previous, dims[k + 1])
            r = int(rng.integers(0, cap + 1)) if cap > 0 else 0
            chosen.append(r)
            previous = r
        ranks = chosen
    matrices = []
    image = np.zeros((dims[0], 0))
    for k, r in enumerate(ranks):
        m_in, m_out = dims[k], dims[k + 1]
        q, _ = np.linalg.qr(image) if image.shape[1] else (np.zeros((m_in, 0)), None)
        projector = np.eye(m_in) - q @ q.T
        a = rng.standard_normal((m_out, r)) @ rng.standard_normal((r, m_in))
        d = a @ projector
        matrices.append(d)
        image = d
    if weighted:
        weights = [rng.uniform(0.5, 2.0, size=d) for d in dims]
    else:
        weights = [np.ones(d) for d in dims]
    return FiniteCochainComplex.from_matrices(matrices, weights)
