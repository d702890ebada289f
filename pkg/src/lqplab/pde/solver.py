"""Energy minimization for the p-Laplace problem.

Iterates stay in the mass-orthogonal complement of the closed cochains. Each
step takes a descent direction from the weak gradient, either preconditioned
by the lagged diffusivity ``d^T M W(theta) d`` or plain, and accepts it by
Armijo backtracking on the energy.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from lqplab.errors import IncompatibleSource, PreconditionError
from lqplab.hodge.system import green
from lqplab.pde.problem import PLaplaceProblem, weak_residual

logger = logging.getLogger(__name__)

SOLVER_METHODS = ("lagged-diffusivity", "gradient")
PRECONDITIONER_SHIFT = 1e-6
MIN_STEP = 1e-14
ENERGY_ROUNDOFF = 1e-13


@dataclass(frozen=True)
class SolverOptions:
    """Options of :func:`solve`.

    Attributes:
        method: ``lagged-diffusivity`` or ``gradient``
        rtol: Weak-residual tolerance, relative to the residual at theta = 0
        max_iterations: Cap on accepted descent steps
        armijo: Sufficient-decrease constant
        backtrack: Step reduction factor of the line search
        anneal: Factor applied once to the regularization near convergence;
            1 disables annealing
        cg_rtol: Relative tolerance of the inner conjugate-gradient solves
    """

    method: str = "lagged-diffusivity"
    rtol: float = 1e-9
    max_iterations: int = 200
    armijo: float = 1e-4
    backtrack: float = 0.5
    anneal: float = 1e-2
    cg_rtol: float = 1e-12

    def __post_init__(self):
        if self.method not in SOLVER_METHODS:
            raise PreconditionError(
                f"Unknown solver method '{self.method}', "
                f"expected one of {SOLVER_METHODS}"
            )
        if not 0.0 < self.armijo < 1.0 or not 0.0 < self.backtrack < 1.0:
            raise PreconditionError(
                "Armijo constant and backtrack factor must lie in (0, 1)"
            )
        if self.rtol <= 0.0 or self.max_iterations < 1:
            raise PreconditionError(
                "rtol must be positive and max_iterations at least 1"
            )
        if not 0.0 < self.anneal <= 1.0:
            raise PreconditionError("anneal must lie in (0, 1]")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class SolveTrace:
    """History of one solve.

    ``energies[0]`` is the energy of the starting point and every further
    entry belongs to an accepted step, whose length is in ``steps``. The
    switch to the annealed regularization is recorded with step 0;
    ``anneal_index`` is the position in ``energies`` where it takes effect.
    """

    method: str
    energies: List[float] = field(default_factory=list)
    steps: List[float] = field(default_factory=list)
    residuals: List[float] = field(default_factory=list)
    termination: str = ""
    tolerance: float = 0.0
    epsilon: float = 0.0
    anneal_index: Optional[int] = None
    residual_regularized: float = math.nan
    residual_unregularized: float = math.nan

    @property
    def iterations(self) -> int:
        return len(self.steps)

    @property
    def final_residual(self) -> float:
        return self.residuals[-1] if self.residuals else math.nan

    @property
    def converged(self) -> bool:
        return self.termination == "converged"

    def energy_nonincreasing(self, slack: float = 1e-12) -> bool:
        """Whether accepted energies never increase within each regularization phase."""
        phases = [self.energies]
        if self.anneal_index is not None:
            cut = self.anneal_index
            phases = [self.energies[:cut], self.energies[cut:]]
        for phase in phases:
            for before, after in zip(phase, phase[1:]):
                if after > before + slack * max(1.0, abs(before)):
                    return False
        return True

    def rows(self) -> List[Dict[str, Any]]:
        """One row per recorded iterate, for CSV output."""
        out = []
        for i, (e, r) in enumerate(zip(self.energies, self.residuals)):
            step = self.steps[i - 1] if i > 0 else 0.0
            out.append({"iteration": i, "energy": e, "step": step, "residual": r})
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "iterations": self.iterations,
            "termination": self.termination,
            "tolerance": self.tolerance,
            "epsilon": self.epsilon,
            "anneal_index": self.anneal_index,
            "final_residual": self.final_residual,
            "residual_regularized": self.residual_regularized,
            "residual_unregularized": self.residual_unregularized,
            "energies": list(self.energies),
            "steps": list(self.steps),
            "residuals": list(self.residuals),
        }


def _lagged_direction(
    problem: PLaplaceProblem,
    x: np.ndarray,
    g: np.ndarray,
    epsilon: float,
    options: SolverOptions,
) -> np.ndarray:
    """Solve ``d^T M W d s = -g`` on the complement of the closed cochains."""
    system, k = problem.system, problem.degree
    dx = system.apply_d(k, x)
    weights = problem.flux_weights(dx, epsilon)
    weights = weights + PRECONDITIONER_SHIFT * max(float(np.mean(weights)), 1e-300)
    scaled = system.mass[k + 1] * weights
    d = system.d[k]
    size = problem.size
    operator = LinearOperator(
        (size, size), matvec=lambda v: d.T @ (scaled * (d @ v)), dtype=float
    )
    s, info = cg(operator, -g, rtol=options.cg_rtol, atol=0.0, maxiter=10 * size)
    if info != 0:
        logger.debug("Inner CG stopped with info=%d", info)
    return problem.project(s)


def _steepest_direction(problem: PLaplaceProblem, g: np.ndarray) -> np.ndarray:
    return problem.project(-g / problem.system.mass[problem.degree])


def _armijo(
    problem: PLaplaceProblem,
    x: np.ndarray,
    s: np.ndarray,
    slope: float,
    energy: float,
    residual: float,
    step: float,
    epsilon: float,
    options: SolverOptions,
) -> Tuple[Optional[float], float]:
    """Backtrack until sufficient decrease.

    Near the minimizer energy differences fall below the round-off of the
    energy sum; a step that keeps the energy within that round-off is then
    accepted when it lowers the weak residual.
    """
    noise = ENERGY_ROUNDOFF * max(abs(energy), 1.0)
    while step >= MIN_STEP:
        trial = problem.energy(x + step * s, epsilon)
        if trial <= energy + options.armijo * step * slope:
            return step, trial
        if trial <= energy + noise:
            if weak_residual(x + step * s, problem, epsilon=epsilon) < residual:
                return step, trial
        step *= options.backtrack
    return None, energy


def solve(
    problem: PLaplaceProblem, options: Optional[SolverOptions] = None
) -> Tuple[np.ndarray, SolveTrace]:
    """Minimize the energy of a compatible p-Laplace problem.

    Args:
        problem: The discrete problem
        options: Solver options (defaults when omitted)

    Returns:
        The minimizer in the complement of the closed cochains and the trace.

    Raises:
        IncompatibleSource: If the source pairs with a closed cochain beyond
            tolerance. The defect report is attached.
    """
    options = options or SolverOptions()
    defect = problem.defect
    if not defect.compatible:
        raise IncompatibleSource(
            f"Source of '{problem.label or 'problem'}' is incompatible: "
            f"max defect {float(np.max(np.abs(defect.vector))):.3e} "
            f"exceeds {defect.tolerance:.1e}",
            defect=defect,
        )
    system, k = problem.system, problem.degree
    scale = max(weak_residual(np.zeros(problem.size), problem), 1.0)
    trace = SolveTrace(
        method=options.method, tolerance=options.rtol * scale, epsilon=problem.epsilon
    )

    if k == system.dim:
        # compatible top-degree sources vanish
        x = np.zeros(problem.size)
        _finish(problem, x, trace, "converged", problem.epsilon)
        return x, trace

    x = green(system, k, problem.alpha)
    if k >= 1:
        x = problem.project(x)
    epsilon = problem.epsilon
    energy = problem.energy(x, epsilon)
    residual = weak_residual(x, problem, epsilon=epsilon)
    trace.energies.append(energy)
    trace.residuals.append(residual)

    if problem.p == 2.0:
        termination = "converged" if residual <= trace.tolerance else "linear"
        _finish(problem, x, trace, termination, epsilon)
        logger.info("p = 2 solve: residual %.3e", residual)
        return x, trace

    annealed = options.anneal == 1.0
    previous: Optional[Tuple[np.ndarray, np.ndarray]] = None
    termination = "max_iterations"
    for iteration in range(options.max_iterations):
        if residual <= trace.tolerance:
            if annealed:
                termination = "converged"
                break
            epsilon *= options.anneal
            annealed = True
            trace.anneal_index = len(trace.energies)
            energy = problem.energy(x, epsilon)
            residual = weak_residual(x, problem, epsilon=epsilon)
            trace.energies.append(energy)
            trace.steps.append(0.0)
            trace.residuals.append(residual)
            logger.debug("Annealed regularization to %.1e", epsilon)
            if residual <= trace.tolerance:
                termination = "converged"
                break

        g = problem.energy_gradient(x, epsilon)
        if options.method == "lagged-diffusivity":
            s = _lagged_direction(problem, x, g, epsilon, options)
            step = 1.0 / (problem.p - 1.0)
        else:
            s = _steepest_direction(problem, g)
            step = 1.0
            if previous is not None:
                dx_prev, dg_prev = x - previous[0], g - previous[1]
                curvature = float(dx_prev @ dg_prev)
                if curvature > 0.0:
                    # Barzilai-Borwein estimate in the mass inner product
                    step = system.inner(k, dx_prev, dx_prev) / curvature
        slope = float(g @ s)
        if slope >= 0.0:
            s = _steepest_direction(problem, g)
            slope = float(g @ s)
        if slope >= 0.0:
            termination = "stalled"
            break

        accepted, trial = _armijo(
            problem, x, s, slope, energy, residual, step, epsilon, options
        )
        if accepted is None:
            termination = "stalled"
            break
        previous = (x, g)
        x = x + accepted * s
        energy = trial
        residual = weak_residual(x, problem, epsilon=epsilon)
        trace.energies.append(energy)
        trace.steps.append(accepted)
        trace.residuals.append(residual)
        logger.debug(
            "Iteration %d: energy %.12e, step %.3e, residual %.3e",
            iteration,
            energy,
            accepted,
            residual,
        )
    else:
        if residual <= trace.tolerance and annealed:
            termination = "converged"

    _finish(problem, x, trace, termination, epsilon)
    log = logger.info if trace.converged else logger.warning
    log(
        "p-Laplace solve (%s, p=%g) %s after %d steps, residual %.3e",
        options.method,
        problem.p,
        termination,
        trace.iterations,
        trace.final_residual,
    )
    return x, trace


def _finish(
    problem: PLaplaceProblem,
    x: np.ndarray,
    trace: SolveTrace,
    termination: str,
    epsilon: float,
) -> None:
    trace.termination = termination
    trace.epsilon = epsilon
    if not trace.residuals:
        trace.energies.append(problem.energy(x))
        trace.residuals.append(weak_residual(x, problem))
    trace.residual_regularized = weak_residual(x, problem)
    trace.residual_unregularized = weak_residual(x, problem, epsilon=0.0)


def gradient_check(
    problem: PLaplaceProblem,
    theta: Optional[np.ndarray] = None,
    directions: int = 10,
    seed: int = 0,
    step: float = 1e-5,
) -> float:
    """Largest relative error between the weak gradient and central differences.

    Directions are random and normalized in the mass inner product; the
    default point is a random cochain.
    """
    rng = np.random.default_rng(seed)
    system, k = problem.system, problem.degree
    x = rng.standard_normal(problem.size) if theta is None else problem.cochain(theta)
    g = problem.energy_gradient(x)
    worst = 0.0
    for _ in range(directions):
        v = rng.standard_normal(problem.size)
        v /= max(system.norm(k, v), 1e-300)
        analytic = float(g @ v)
        forward, backward = problem.energy(x + step * v), problem.energy(x - step * v)
        numeric = (forward - backward) / (2.0 * step)
        error = abs(numeric - analytic) / max(abs(analytic), 1e-8)
        worst = max(worst, error)
    logger.debug("Gradient check over %d directions: %.3e", directions, worst)
    return worst
