"""Discrete Hodge theory on periodic grids.

Cochains of degree k are flat vectors in the component-major layout of
:func:`lqplab.forms.stencils.exterior_derivative_matrix`. The inner product
of degree k is the diagonal mass ``M_k`` from the complex weights,
``delta_k = M_{k-1}^{-1} d_{k-1}^T M_k`` is the exact adjoint of d and
``Delta = d delta + delta d``. On a flat torus with the forward stencil the
Laplacian acts on every component as the scalar periodic Laplacian, so it
is diagonalized by the FFT.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, cg

from lqplab.complex.discretize import level_weights
from lqplab.errors import ComplexError, NonConvergenceError
from lqplab.forms.form import DifferentialForm, sample_cochain
from lqplab.forms.multiindex import multi_indices
from lqplab.forms.stencils import exterior_derivative_matrix
from lqplab.geometry.grid import Grid
from lqplab.geometry.metric import DiagonalMetric

logger = logging.getLogger(__name__)

KERNEL_TOLERANCE = 1e-10
DENSE_LIMIT = 4096
GREEN_METHODS = ("auto", "fft", "cg")


@dataclass(frozen=True, eq=False)
class DiscreteHodgeSystem:
    """Cochain spaces of a periodic grid with d, delta and Delta."""

    grid: Grid
    d: Tuple[sp.csr_matrix, ...]
    mass: Tuple[np.ndarray, ...]
    _cache: Dict[Tuple[str, int], object] = field(default_factory=dict, repr=False)

    @classmethod
    def build(
        cls, grid: Grid, metric: Optional[DiagonalMetric] = None
    ) -> "DiscreteHodgeSystem":
        """Assemble the system on a circle or torus grid.

        Raises:
            ComplexError: If the grid is not fully periodic.
        """
        if not grid.is_tensor or not grid.domain.is_closed:
            raise ComplexError("Hodge systems need a circle or torus grid")
        n = grid.dim
        metric = metric or DiagonalMetric.euclidean(n)
        d = tuple(exterior_derivative_matrix(grid, k, "forward") for k in range(n))
        mass = tuple(level_weights(grid, metric, k) for k in range(n + 1))
        logger.debug("Assembled Hodge system on grid %s", grid.shape)
        return cls(grid, d, mass)

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def uniform(self) -> bool:
        """Whether every mass vector is constant (FFT path available)."""
        return all(np.ptp(m) <= 1e-14 * np.max(m) for m in self.mass)

    def size(self, k: int) -> int:
        return self.mass[k].size

    def _check(self, k: int) -> None:
        if not 0 <= k <= self.dim:
            raise ComplexError(f"Degree {k} outside 0..{self.dim}")

    def inner(self, k: int, a: np.ndarray, b: np.ndarray) -> float:
        return float(np.sum(self.mass[k] * a * b))

    def norm(self, k: int, a: np.ndarray) -> float:
        return math.sqrt(max(self.inner(k, a, a), 0.0))

    def apply_d(self, k: int, a: np.ndarray) -> np.ndarray:
        """``d_k a``; zero in degree n."""
        self._check(k)
        if k == self.dim:
            return np.zeros(0)
        return self.d[k] @ a

    def apply_delta(self, k: int, a: np.ndarray) -> np.ndarray:
        """``delta_k a`` of degree k-1; empty in degree 0."""
        self._check(k)
        if k == 0:
            return np.zeros(0)
        return (self.d[k - 1].T @ (self.mass[k] * a)) / self.mass[k - 1]

    def delta_matrix(self, k: int) -> sp.csr_matrix:
        self._check(k)
        if k == 0:
            return sp.csr_matrix((0, self.size(0)))
        return sp.csr_matrix(
            sp.diags(1.0 / self.mass[k - 1]) @ self.d[k - 1].T @ sp.diags(self.mass[k])
        )

    def laplacian_matrix(self, k: int) -> sp.csr_matrix:
        self._check(k)
        m = self.size(k)
        out = sp.csr_matrix((m, m))
        if k >= 1:
            out = out + self.d[k - 1] @ self.delta_matrix(k)
        if k < self.dim:
            out = out + self.delta_matrix(k + 1) @ self.d[k]
        return sp.csr_matrix(out)

    def apply_laplacian(self, k: int, a: np.ndarray) -> np.ndarray:
        out = np.zeros_like(a, dtype=float)
        if k >= 1:
            out += self.d[k - 1] @ self.apply_delta(k, a)
        if k < self.dim:
            out += self.apply_delta(k + 1, self.d[k] @ a)
        return out

    def symbol(self) -> np.ndarray:
        """Eigenvalues of the scalar periodic Laplacian, shape ``grid.shape``."""
        total = np.zeros(self.grid.shape)
        for axis, (n_nodes, h) in enumerate(zip(self.grid.shape, self.grid.spacing)):
            m = np.arange(n_nodes)
            values = (2.0 - 2.0 * np.cos(2.0 * math.pi * m / n_nodes)) / h**2
            shape = [1] * self.dim
            shape[axis] = n_nodes
            total = total + values.reshape(shape)
        return total

    def cochain(self, form: DifferentialForm) -> np.ndarray:
        """Sample a form at the staggered coefficient nodes."""
        return sample_cochain(form, self.grid).ravel()


def harmonic_basis(
    system: DiscreteHodgeSystem, k: int, method: str = "auto"
) -> np.ndarray:
    """Mass-orthonormal basis of ker Delta_k as columns.

    ``structure`` uses the per-component constants (the kernel of the flat
    forward Laplacian); ``dense`` computes the null space of the symmetric
    matrix ``M Delta`` with tolerance ``1e-10 sigma_max``.
    """
    system._check(k)
    if method == "auto":
        method = "structure" if system.uniform else "dense"
    key = (f"harmonic-{method}", k)
    if key in system._cache:
        return system._cache[key]  # type: ignore[return-value]
    m_nodes = system.grid.size
    n_comp = len(multi_indices(system.dim, k))
    if method == "structure":
        if not system.uniform:
            raise ComplexError("Structured harmonic basis needs uniform weights")
        basis = np.zeros((n_comp * m_nodes, n_comp))
        for c in range(n_comp):
            block = slice(c * m_nodes, (c + 1) * m_nodes)
            basis[block, c] = 1.0 / math.sqrt(float(np.sum(system.mass[k][block])))
    elif method == "dense":
        size = system.size(k)
        if size > DENSE_LIMIT:
            raise ComplexError(
                f"Dense kernel computation limited to {DENSE_LIMIT} rows"
            )
        lap = system.laplacian_matrix(k).toarray()
        sym = system.mass[k][:, None] * lap
        sym = 0.5 * (sym + sym.T)
        kernel = scipy.linalg.null_space(sym, rcond=KERNEL_TOLERANCE)
        gram = kernel.T @ (system.mass[k][:, None] * kernel)
        chol = np.linalg.cholesky(gram)
        basis = kernel @ np.linalg.inv(chol).T
    else:
        raise ComplexError(f"Unknown harmonic basis method '{method}'")
    system._cache[key] = basis
    return basis


def harmonic_dimension(
    system: DiscreteHodgeSystem, k: int, method: str = "dense"
) -> int:
    return int(harmonic_basis(system, k, method).shape[1])


def harmonic_projection(
    system: DiscreteHodgeSystem, k: int, alpha: np.ndarray
) -> np.ndarray:
    """Orthogonal projection H onto the harmonic cochains."""
    basis = harmonic_basis(system, k)
    coefficients = basis.T @ (system.mass[k] * alpha)
    return basis @ coefficients


def spectral_gap(system: DiscreteHodgeSystem, k: int) -> float:
    """Smallest positive eigenvalue of Delta_k."""
    system._check(k)
    if system.uniform:
        sym = system.symbol()
        return float(np.min(sym[sym > KERNEL_TOLERANCE * np.max(sym)]))
    lap = system.laplacian_matrix(k).toarray()
    root = np.sqrt(system.mass[k])
    sym = root[:, None] * lap / root[None, :]
    eigenvalues = np.linalg.eigvalsh(0.5 * (sym + sym.T))
    return float(np.min(eigenvalues[eigenvalues > KERNEL_TOLERANCE * eigenvalues[-1]]))


def _green_fft(system: DiscreteHodgeSystem, k: int, rhs: np.ndarray) -> np.ndarray:
    sym = system.symbol()
    inverse = np.zeros_like(sym)
    positive = sym > KERNEL_TOLERANCE * np.max(sym)
    inverse[positive] = 1.0 / sym[positive]
    blocks = rhs.reshape(-1, *system.grid.shape)
    out = np.empty_like(blocks)
    for c, block in enumerate(blocks):
        out[c] = np.real(np.fft.ifftn(np.fft.fftn(block) * inverse))
    return out.ravel()


def _green_cg(
    system: DiscreteHodgeSystem, k: int, rhs: np.ndarray, rtol: float, maxiter: int
) -> np.ndarray:
    mass = system.mass[k]
    size = system.size(k)
    operator = LinearOperator(
        (size, size), matvec=lambda x: mass * system.apply_laplacian(k, x), dtype=float
    )
    solution, info = cg(operator, mass * rhs, rtol=rtol, atol=0.0, maxiter=maxiter)
    residual = system.norm(k, system.apply_laplacian(k, solution) - rhs)
    if info != 0:
        raise NonConvergenceError(
            f"Conjugate gradients stopped with info={info}", residual=residual
        )
    logger.debug("Green CG solve residual %.3e", residual)
    return solution


def green(
    system: DiscreteHodgeSystem,
    k: int,
    alpha: np.ndarray,
    method: str = "auto",
    rtol: float = 1e-13,
    maxiter: int = 20000,
) -> np.ndarray:
    """Green operator: the solution of ``Delta x = alpha - H alpha`` with ``H x = 0``.

    Args:
        system: The Hodge system
        k: Degree of alpha
        alpha: Cochain of degree k
        method: ``fft`` (uniform weights), ``cg`` or ``auto``
        rtol: Relative tolerance of the CG path
        maxiter: Iteration cap of the CG path

    Raises:
        NonConvergenceError: If conjugate gradients fail, with the residual.
    """
    system._check(k)
    if method not in GREEN_METHODS:
        raise ComplexError(f"Unknown Green method '{method}'")
    if method == "auto":
        method = "fft" if system.uniform else "cg"
    if method == "fft" and not system.uniform:
        raise ComplexError("FFT Green solve needs uniform weights")
    rhs = alpha - harmonic_projection(system, k, alpha)
    if method == "fft":
        x = _green_fft(system, k, rhs)
    else:
        x = _green_cg(system, k, rhs, rtol, maxiter)
    return x - harmonic_projection(system, k, x)


@dataclass
class HodgeSplit:
    """Exact, coexact and harmonic parts of a cochain."""

    exact: np.ndarray
    coexact: np.ndarray
    harmonic: np.ndarray
    reconstruction_error: float
    inner_products: Dict[str, float]

    @property
    def orthogonality_error(self) -> float:
        return max(abs(v) for v in self.inner_products.values())


_SPLIT_PAIRS = ("exact-coexact", "exact-harmonic", "coexact-harmonic")


def hodge_decompose(
    system: DiscreteHodgeSystem, k: int, alpha: np.ndarray, method: str = "auto"
) -> HodgeSplit:
    """Split ``alpha = d delta G alpha + delta d G alpha + H alpha``.

    Reconstruction error and pairwise inner products are relative to
    ``||alpha||^2`` (the error to ``||alpha||``).
    """
    system._check(k)
    zero = np.zeros_like(alpha, dtype=float)
    scale = system.norm(k, alpha)
    if scale == 0.0:
        products = dict.fromkeys(_SPLIT_PAIRS, 0.0)
        return HodgeSplit(zero, zero.copy(), zero.copy(), 0.0, products)
    g = green(system, k, alpha, method)
    exact = system.d[k - 1] @ system.apply_delta(k, g) if k >= 1 else zero
    coexact = (
        system.apply_delta(k + 1, system.d[k] @ g) if k < system.dim else zero.copy()
    )
    harmonic = harmonic_projection(system, k, alpha)
    error = system.norm(k, exact + coexact + harmonic - alpha) / scale
    # divide twice: scale**2 underflows for tiny alpha
    products = {
        "exact-coexact": system.inner(k, exact, coexact) / scale / scale,
        "exact-harmonic": system.inner(k, exact, harmonic) / scale / scale,
        "coexact-harmonic": system.inner(k, coexact, harmonic) / scale / scale,
    }
    return HodgeSplit(exact, coexact, harmonic, error, products)


@dataclass
class IdentityReport:
    """Worst relative error of each Green-operator identity over the samples."""

    degree: int
    samples: int
    errors: Dict[str, float]
    spectral_gap: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(e <= self.tolerance for e in self.errors.values()) and (
            self.spectral_gap > 0
        )


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0), 1e-300)
    return float(np.max(np.abs(a - b), initial=0.0) / scale)


def random_cochains(
    system: DiscreteHodgeSystem, k: int, count: int, seed: int = 0
) -> List[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [rng.standard_normal(system.size(k)) for _ in range(count)]


def verify_identities(
    system: DiscreteHodgeSystem,
    k: int,
    samples: Optional[Sequence[np.ndarray]] = None,
    tolerance: float = 1e-10,
    method: str = "auto",
) -> IdentityReport:
    """Check the Green-operator identities on sample cochains of degree k.

    Identities: ``dG = Gd``, ``delta G = G delta``, ``Delta G = I - H``,
    ``G Delta = I - H``, ``H^2 = H`` and ``Delta (I - H) = Delta``. The kernel
    intersection ``ker Delta cap Im(I - H) = {0}`` is recorded through the
    spectral gap, which must be positive.
    """
    system._check(k)
    samples = list(samples) if samples is not None else random_cochains(system, k, 20)
    errors: Dict[str, float] = {}

    def record(name: str, value: float) -> None:
        errors[name] = max(errors.get(name, 0.0), value)

    for alpha in samples:
        g = green(system, k, alpha, method)
        h = harmonic_projection(system, k, alpha)
        lap = system.apply_laplacian(k, alpha)
        record("laplacian_green", _relative(system.apply_laplacian(k, g), alpha - h))
        record("green_laplacian", _relative(green(system, k, lap, method), alpha - h))
        record("projection_idempotent", _relative(harmonic_projection(system, k, h), h))
        record(
            "laplacian_complement",
            _relative(system.apply_laplacian(k, alpha - h), lap),
        )
        if k < system.dim:
            record(
                "d_commutes",
                _relative(
                    system.d[k] @ g, green(system, k + 1, system.d[k] @ alpha, method)
                ),
            )
        if k >= 1:
            record(
                "delta_commutes",
                _relative(
                    system.apply_delta(k, g),
                    green(system, k - 1, system.apply_delta(k, alpha), method),
                ),
            )
    gap = spectral_gap(system, k)
    report = IdentityReport(k, len(samples), errors, gap, tolerance)
    logger.info(
        "Hodge identities in degree %d over %d samples: worst %.3e",
        k,
        len(samples),
        max(errors.values()) if errors else 0.0,
    )
    return report


@dataclass
class ImageIdentityReport:
    """Comparison of the column spaces of ``delta d`` and ``delta`` in degree k."""

    degree: int
    rank_delta_d: int
    rank_delta: int
    residual_delta_in_delta_d: float
    residual_delta_d_in_delta: float
    tolerance: float

    @property
    def holds(self) -> bool:
        return (
            self.rank_delta_d == self.rank_delta
            and self.residual_delta_in_delta_d <= self.tolerance
            and self.residual_delta_d_in_delta <= self.tolerance
        )


def _containment_residual(columns: np.ndarray, basis: np.ndarray) -> float:
    if columns.shape[1] == 0:
        return 0.0
    scale = max(float(np.max(np.abs(columns))), 1e-300)
    projected = basis @ (basis.T @ columns) if basis.shape[1] else 0.0 * columns
    return float(np.max(np.abs(columns - projected)) / scale)


def image_identity_check(
    system: DiscreteHodgeSystem, k: int, tolerance: float = 1e-10
) -> ImageIdentityReport:
    """Check ``Im(delta d) = Im(delta)`` on degree-k cochains.

    ``delta`` is taken from degree k+1, so in the top degree both images are
    ``{0}``. Containment is measured by least-squares residuals against
    orthonormal bases of each column space.
    """
    system._check(k)
    size = system.size(k)
    if k == system.dim:
        return ImageIdentityReport(k, 0, 0, 0.0, 0.0, tolerance)
    if size > DENSE_LIMIT or system.size(k + 1) > DENSE_LIMIT:
        raise ComplexError(f"Image identity check limited to {DENSE_LIMIT} rows")
    delta = system.delta_matrix(k + 1).toarray()
    delta_d = delta @ system.d[k].toarray()
    basis_dd = scipy.linalg.orth(delta_d, rcond=KERNEL_TOLERANCE)
    basis_d = scipy.linalg.orth(delta, rcond=KERNEL_TOLERANCE)
    return ImageIdentityReport(
        k,
        basis_dd.shape[1],
        basis_d.shape[1],
        _containment_residual(delta, basis_dd),
        _containment_residual(delta_d, basis_d),
        tolerance,
    )
