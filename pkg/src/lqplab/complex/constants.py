"""Best constants of a finite cochain complex.

Three constants are computed at a level k, all through ``D = D_{k-1}``:

* the solvability constant: the least C such that every theta in B^k has a
  preimage eta with ``||eta||_q <= C ||theta||_p``;
* the corrector constant: the least C' such that every xi in F^{k-1} is
  within ``C' ||D xi||_p`` of ker D in the q-norm;
* the image constant gamma: the norm of ``D^{-1}: B^k -> F^{k-1}/Z^{k-1}``.

All three reduce to maximizing ``dist_q(P c, ker D) / ||U c||_p`` over a
parameter vector c. For p = q = 2 the maximum is a singular value problem.
Otherwise an inner damped Newton method evaluates the distance (a smooth
convex problem in the kernel coordinates) and an outer BFGS ascent with
multi-start maximizes the ratio using the envelope gradient. Small problems
are cross-checked by dense sampling of the parameter sphere.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

import numpy as np
import scipy.linalg
from scipy.optimize import minimize

from lqplab.complex.cochain import (
    RANK_TOLERANCE,
    FiniteCochainComplex,
    cohomology_dimension,
)
from lqplab.errors import ComplexError, NonConvergenceError
from lqplab.geometry.exponents import ExponentLike, reciprocal

logger = logging.getLogger(__name__)

METHODS = ("auto", "svd", "convex-opt", "brute-force")
BRUTE_FORCE_MAX_DIM = 6
BRUTE_FORCE_SAMPLES = 20000
SMOOTHING = 1e-9
NEWTON_RTOL = 1e-14


@dataclass
class ConstantReport:
    """A computed best constant with the vector achieving it.

    For ``kind == "corrector"`` the certificate lives in F^{k-1} (the vector
    xi); otherwise it is the right-hand side theta in B^k.
    """

    kind: str
    level: int
    value: float
    method: str
    p: float
    q: float
    certificate: np.ndarray
    reachable: bool = True
    cohomology: int = 0
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "level": self.level,
            "value": self.value,
            "method": self.method,
            "p": self.p,
            "q": self.q,
            "reachable": self.reachable,
            "cohomology": self.cohomology,
            "certificate": [float(x) for x in self.certificate],
            **self.details,
        }


def weighted_norm(x: np.ndarray, weights: np.ndarray, p: float) -> np.ndarray:
    """``(sum_i w_i |x_i|^p)^{1/p}`` along the last axis; max for p = inf."""
    a = np.abs(np.asarray(x, dtype=float))
    if math.isinf(p):
        return np.max(a, axis=-1, initial=0.0)
    return np.sum(weights * a**p, axis=-1) ** (1.0 / p)


def _exponent(value: ExponentLike) -> float:
    inv = reciprocal(value)
    return math.inf if inv == 0 else 1.0 / float(inv)


def _general_exponents(p: float, q: float) -> None:
    for name, e in (("p", p), ("q", q)):
        if not 1.0 < e < math.inf:
            raise ComplexError(
                f"Optimization-based constants need 1 < {name} < inf, got {e}"
            )


def kernel_basis(matrix: np.ndarray) -> np.ndarray:
    """Orthonormal basis of ker(matrix) as columns."""
    if matrix.shape[0] == 0:
        return np.eye(matrix.shape[1])
    return scipy.linalg.null_space(matrix, rcond=RANK_TOLERANCE)


def range_basis(matrix: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the column space of ``matrix``."""
    if matrix.size == 0:
        return np.zeros((matrix.shape[0], 0))
    return scipy.linalg.orth(matrix, rcond=RANK_TOLERANCE)


def shift_minimum(
    base: np.ndarray,
    kernel: np.ndarray,
    weights: np.ndarray,
    q: float,
    max_iterations: int = 100,
) -> Tuple[np.ndarray, np.ndarray]:
    """Minimize ``||b + N z||_{q,w}`` over z for a batch of vectors b.

    Args:
        base: Vectors b, shape (B, m) or (m,)
        kernel: Columns spanning the subspace, shape (m, r)
        weights: Positive weights, shape (m,)
        q: Exponent in (1, inf)

    Returns:
        Minimal values of shape (B,) and the minimizing points ``b + N z``
        of shape (B, m).

    Raises:
        NonConvergenceError: If Newton's method stalls for some vector.
    """
    b = np.atleast_2d(np.asarray(base, dtype=float))
    r = kernel.shape[1]
    if r == 0:
        return weighted_norm(b, weights, q), b.copy()
    gram = kernel.T @ (weights[:, None] * kernel)
    z = -np.linalg.solve(gram, ((b * weights) @ kernel).T).T
    if q == 2.0:
        x = b + z @ kernel.T
        return weighted_norm(x, weights, 2.0), x

    scale = np.maximum(np.max(np.abs(b), axis=1), 1e-300)
    delta2 = (SMOOTHING * scale[:, None]) ** 2

    def objective(zz: np.ndarray) -> np.ndarray:
        x = b + zz @ kernel.T
        return np.sum(weights * (x**2 + delta2) ** (q / 2.0), axis=1)

    value = objective(z)
    eye = np.eye(r)
    done = np.zeros(len(b), dtype=bool)
    for iteration in range(max_iterations):
        x = b + z @ kernel.T
        a2 = x**2 + delta2
        base_pow = a2 ** (q / 2.0 - 1.0)
        grad = (q * weights * base_pow * x) @ kernel
        curvature = q * weights * base_pow * (1.0 + (q - 2.0) * x**2 / a2)
        hess = np.einsum("bm,mi,mj->bij", curvature, kernel, kernel)
        ridge = 1e-14 * np.trace(hess, axis1=1, axis2=2)[:, None, None] / r
        step = np.linalg.solve(hess + ridge * eye, grad[..., None])[..., 0]
        decrement = np.sum(grad * step, axis=1)
        done |= decrement <= NEWTON_RTOL * value
        if np.all(done):
            break
        t = np.where(done, 0.0, 1.0)
        candidate = objective(z - t[:, None] * step)
        for _ in range(60):
            bad = candidate > value - 1e-4 * t * decrement
            if not np.any(bad):
                break
            t = np.where(bad, 0.5 * t, t)
            candidate = np.where(bad, objective(z - t[:, None] * step), candidate)
        # no progress along the Newton direction: stationary up to round-off
        stuck = (candidate > value - 1e-4 * t * decrement) | (candidate >= value)
        t = np.where(stuck, 0.0, t)
        done |= stuck
        z = z - t[:, None] * step
        value = np.where(stuck, value, candidate)
    else:
        if not np.all(done):
            pending = decrement[~done] / value[~done]
            raise NonConvergenceError(
                f"Kernel shift minimization did not converge in {max_iterations} steps",
                residual=float(np.max(pending)),
            )
    logger.debug("Shift minimization converged after %d Newton steps", iteration)
    x = b + z @ kernel.T
    return weighted_norm(x, weights, q), x


@dataclass(frozen=True)
class _QuotientProblem:
    """``sup_c dist_q(P c, span N) / ||U c||_p`` with the weights of each side."""

    lift: np.ndarray
    image: np.ndarray
    kernel: np.ndarray
    source_weights: np.ndarray
    target_weights: np.ndarray
    p: float
    q: float

    @property
    def dim(self) -> int:
        return self.lift.shape[1]

    def ratios(self, c: np.ndarray) -> np.ndarray:
        c = np.atleast_2d(c)
        num, _ = shift_minimum(
            c @ self.lift.T, self.kernel, self.source_weights, self.q
        )
        den = weighted_norm(c @ self.image.T, self.target_weights, self.p)
        return num / den

    def negative_log_ratio(self, c: np.ndarray) -> Tuple[float, np.ndarray]:
        p, q = self.p, self.q
        num, x = shift_minimum(c @ self.lift.T, self.kernel, self.source_weights, q)
        x = x[0]
        theta = self.image @ c
        mass_q = num[0] ** q
        mass_p = float(np.sum(self.target_weights * np.abs(theta) ** p))
        grad_num = self.lift.T @ (
            self.source_weights * np.sign(x) * np.abs(x) ** (q - 1.0)
        ) / mass_q
        grad_den = self.image.T @ (
            self.target_weights * np.sign(theta) * np.abs(theta) ** (p - 1.0)
        ) / mass_p
        norm2 = float(c @ c)
        log_norm = 0.5 * math.log(norm2)
        value = -math.log(num[0]) + math.log(mass_p) / p + 0.5 * log_norm**2
        grad = -grad_num + grad_den + log_norm * c / norm2
        return value, grad

    def polish(self, start: np.ndarray) -> Tuple[float, np.ndarray]:
        result = minimize(
            self.negative_log_ratio,
            start / np.linalg.norm(start),
            jac=True,
            method="BFGS",
            options={"gtol": 1e-11, "maxiter": 1000},
        )
        c = result.x / np.linalg.norm(result.x)
        return float(self.ratios(c)[0]), c


def _ascent(
    problem: _QuotientProblem, starts: np.ndarray
) -> Tuple[float, np.ndarray]:
    best_value, best_c = -1.0, starts[0]
    for start in starts:
        value, c = problem.polish(start)
        if value > best_value:
            best_value, best_c = value, c
    return best_value, best_c


def _seeds(problem: _QuotientProblem, rng: np.random.Generator, count: int):
    """Maximizers of the p = q = 2 ratio plus random starts."""
    _, residual = shift_minimum(
        problem.lift.T, problem.kernel, problem.source_weights, 2.0
    )
    residual = residual.T
    tw = problem.target_weights[:, None]
    pencil_a = residual.T @ (problem.source_weights[:, None] * residual)
    pencil_b = problem.image.T @ (tw * problem.image)
    _, vectors = scipy.linalg.eigh(pencil_a, pencil_b)
    random = rng.standard_normal((count, problem.dim))
    return np.vstack([vectors.T[::-1], random])


def _brute_force(
    problem: _QuotientProblem, rng: np.random.Generator, samples: int
) -> Tuple[float, np.ndarray]:
    if problem.dim > BRUTE_FORCE_MAX_DIM:
        raise ComplexError(
            f"Brute force is limited to dimension {BRUTE_FORCE_MAX_DIM}, "
            f"got {problem.dim}"
        )
    points = rng.standard_normal((samples, problem.dim))
    points /= np.linalg.norm(points, axis=1, keepdims=True)
    chunks = np.array_split(points, max(1, samples // 2048))
    ratios = np.concatenate([problem.ratios(chunk) for chunk in chunks])
    top = np.argsort(ratios)[::-1][:5]
    logger.debug("Brute force sampled max %.12g before polishing", ratios[top[0]])
    return _ascent(problem, points[top])


def _solve(
    problem: _QuotientProblem, method: str, seed: int, starts: int
) -> Tuple[float, np.ndarray]:
    rng = np.random.default_rng(seed)
    _general_exponents(problem.p, problem.q)
    if method == "brute-force":
        return _brute_force(problem, rng, BRUTE_FORCE_SAMPLES)
    return _ascent(problem, _seeds(problem, rng, starts))


def _resolve_method(method: str, p: float, q: float) -> str:
    if method not in METHODS:
        raise ComplexError(f"Unknown method '{method}', expected one of {METHODS}")
    if method == "auto":
        return "svd" if p == 2.0 and q == 2.0 else "convex-opt"
    if method == "svd" and not (p == 2.0 and q == 2.0):
        raise ComplexError("The SVD method requires p = q = 2")
    return method


def _weighted_operator(complex_: FiniteCochainComplex, k: int) -> np.ndarray:
    d = complex_.differential(k - 1)
    src = complex_.weights[k - 1]
    return np.sqrt(complex_.weights[k])[:, None] * d / np.sqrt(src)[None, :]


def _quotient_problem(
    complex_: FiniteCochainComplex, k: int, p: float, q: float, corrector: bool
) -> _QuotientProblem:
    d = complex_.differential(k - 1)
    kernel = kernel_basis(d)
    source_w = complex_.weights[k - 1]
    if corrector:
        lift = range_basis(d.T)
        image = d @ lift
    else:
        image = range_basis(d)
        lift = np.linalg.pinv(d, rcond=RANK_TOLERANCE) @ image
    return _QuotientProblem(
        lift, image, kernel, source_w, complex_.weights[k], p, q
    )


def _unreachable(kind: str, k: int, p: float, q: float, method: str, size: int, h: int):
    return ConstantReport(
        kind, k, 0.0, method, p, q, np.zeros(size), reachable=False, cohomology=h
    )


def solvability_constant(
    complex_: FiniteCochainComplex,
    k: int,
    p: ExponentLike = 2,
    q: ExponentLike = 2,
    method: str = "auto",
    scope: str = "exact",
    seed: int = 0,
    starts: int = 12,
) -> ConstantReport:
    """Best constant for solving ``D eta = theta`` with ``||eta||_q <= C ||theta||_p``.

    Args:
        complex_: The complex
        k: Level of theta (``1 <= k <= N``)
        p, q: Exponents
        method: ``auto``, ``svd``, ``convex-opt`` or ``brute-force``
        scope: ``exact`` takes theta over B^k; ``closed`` takes it over Z^k,
            which makes the constant infinite whenever H^k does not vanish
        seed: Seed of the multi-start and sampling generators
        starts: Number of random starts added to the deterministic seeds

    Returns:
        The report; when B^k = 0 the constant is 0 and ``reachable`` False.
    """
    complex_.check_level(k)
    if k < 1:
        raise ComplexError("Solvability constants start at level 1")
    if scope not in ("exact", "closed"):
        raise ComplexError(f"Unknown scope '{scope}'")
    pf, qf = _exponent(p), _exponent(q)
    method = _resolve_method(method, pf, qf)
    h = cohomology_dimension(complex_, k)
    dims = complex_.dims
    if scope == "closed" and h > 0:
        logger.info("H^%d has dimension %d; no solvability constant exists", k, h)
        return ConstantReport(
            "solvability", k, math.inf, method, pf, qf, np.zeros(dims[k]), True, h
        )
    a = _weighted_operator(complex_, k)
    if not np.any(a):
        return _unreachable("solvability", k, pf, qf, method, dims[k], h)
    if method == "svd":
        u, sigma, vt = np.linalg.svd(a, full_matrices=False)
        positive = sigma > RANK_TOLERANCE * sigma[0]
        i = int(np.nonzero(positive)[0][-1])
        eta = vt[i] / np.sqrt(complex_.weights[k - 1])
        theta = complex_.differential(k - 1) @ eta
        value = 1.0 / float(sigma[i])
    else:
        problem = _quotient_problem(complex_, k, pf, qf, corrector=False)
        value, c = _solve(problem, method, seed, starts)
        theta = problem.image @ c
    logger.debug("Solvability constant at level %d (%s): %.12g", k, method, value)
    return ConstantReport("solvability", k, value, method, pf, qf, theta, True, h)


def corrector_constant(
    complex_: FiniteCochainComplex,
    k: int,
    p: ExponentLike = 2,
    q: ExponentLike = 2,
    method: str = "auto",
    seed: int = 0,
    starts: int = 12,
) -> ConstantReport:
    """Least C' with ``inf_{zeta in ker D} ||xi - zeta||_q <= C' ||D xi||_p``.

    ``D = D_{k-1}`` and xi ranges over F^{k-1}. With D = 0 the constant is 0
    (take zeta = xi). For p = q = 2 the value is ``1/sqrt(lambda)`` with
    lambda the least positive eigenvalue of ``D^T W_k D`` relative to
    ``W_{k-1}``.
    """
    complex_.check_level(k)
    if k < 1:
        raise ComplexError("Corrector constants start at level 1")
    pf, qf = _exponent(p), _exponent(q)
    method = _resolve_method(method, pf, qf)
    h = cohomology_dimension(complex_, k)
    d = complex_.differential(k - 1)
    w_src, w_tgt = complex_.weights[k - 1], complex_.weights[k]
    if not np.any(d):
        return _unreachable("corrector", k, pf, qf, method, d.shape[1], h)
    if method == "svd":
        stiffness = d.T @ (w_tgt[:, None] * d)
        eigenvalues, vectors = scipy.linalg.eigh(stiffness, np.diag(w_src))
        positive = eigenvalues > RANK_TOLERANCE * eigenvalues[-1]
        i = int(np.nonzero(positive)[0][0])
        value = 1.0 / math.sqrt(float(eigenvalues[i]))
        xi = vectors[:, i]
    else:
        problem = _quotient_problem(complex_, k, pf, qf, corrector=True)
        value, c = _solve(problem, method, seed, starts)
        xi = problem.lift @ c
    logger.debug("Corrector constant at level %d (%s): %.12g", k, method, value)
    return ConstantReport("corrector", k, value, method, pf, qf, xi, True, h)


def image_constant(
    complex_: FiniteCochainComplex,
    k: int,
    p: ExponentLike = 2,
    q: ExponentLike = 2,
    method: str = "auto",
    seed: int = 0,
    starts: int = 12,
) -> ConstantReport:
    """Norm gamma of ``D^{-1}: B^k -> F^{k-1}/Z^{k-1}``.

    For p = q = 2 this is the operator norm of the weighted pseudo-inverse;
    other exponents go through the same quotient maximization as the
    solvability constant. The corrector constant never exceeds ``2 gamma``.
    """
    complex_.check_level(k)
    if k < 1:
        raise ComplexError("Image constants start at level 1")
    pf, qf = _exponent(p), _exponent(q)
    method = _resolve_method(method, pf, qf)
    h = cohomology_dimension(complex_, k)
    a = _weighted_operator(complex_, k)
    if not np.any(a):
        return _unreachable("image", k, pf, qf, method, complex_.dims[k], h)
    if method == "svd":
        inverse = np.linalg.pinv(a, rcond=RANK_TOLERANCE)
        u, sigma, vt = np.linalg.svd(inverse)
        value = float(sigma[0])
        theta = vt[0] / np.sqrt(complex_.weights[k])
    else:
        problem = _quotient_problem(complex_, k, pf, qf, corrector=False)
        value, c = _solve(problem, method, seed, starts)
        theta = problem.image @ c
    return ConstantReport("image", k, value, method, pf, qf, theta, True, h)


def certificate_ratio(complex_: FiniteCochainComplex, report: ConstantReport) -> float:
    """Recompute the ratio achieved by a report's certificate."""
    if not report.reachable or math.isinf(report.value):
        return report.value
    k = report.level
    d = complex_.differential(k - 1)
    kernel = kernel_basis(d)
    w_src, w_tgt = complex_.weights[k - 1], complex_.weights[k]
    if report.kind == "corrector":
        xi = report.certificate
        num, _ = shift_minimum(xi, kernel, w_src, report.q)
        return float(num[0] / weighted_norm(d @ xi, w_tgt, report.p))
    theta = report.certificate
    eta0 = np.linalg.lstsq(d, theta, rcond=None)[0]
    num, _ = shift_minimum(eta0, kernel, w_src, report.q)
    return float(num[0] / weighted_norm(theta, w_tgt, report.p))


@dataclass(frozen=True)
class MonotonicityReport:
    """Corrector constants for two exponents against the Hoelder factor."""

    level: int
    q_small: float
    q_large: float
    constant_small: float
    constant_large: float
    volume: float
    factor: float

    @property
    def holds(self) -> bool:
        return self.constant_small <= self.factor * self.constant_large * (1 + 1e-6)


def quotient_monotonicity(
    complex_: FiniteCochainComplex,
    k: int,
    p: ExponentLike,
    q_small: ExponentLike,
    q_large: ExponentLike,
    seed: int = 0,
) -> MonotonicityReport:
    """Compare corrector constants under the embedding ``l^{q2} -> l^{q1}``.

    With total weight V of level k-1, ``||x||_{q1} <= V^{1/q1 - 1/q2} ||x||_{q2}``
    so the corrector constant for q1 is at most that factor times the one for
    q2.
    """
    q1, q2 = _exponent(q_small), _exponent(q_large)
    if q1 > q2:
        raise ComplexError(f"Need q1 <= q2, got {q1} > {q2}")
    small = corrector_constant(complex_, k, p, q1, seed=seed)
    large = corrector_constant(complex_, k, p, q2, seed=seed)
    vol = float(np.sum(complex_.weights[k - 1]))
    factor = vol ** (1.0 / q1 - 1.0 / q2)
    return MonotonicityReport(k, q1, q2, small.value, large.value, vol, factor)
