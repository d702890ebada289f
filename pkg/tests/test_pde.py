"""
Tests for the p-Laplace problem on forms and its solver.
"""

import math

import numpy as np
import pytest
import sympy

from lqplab.errors import IncompatibleSource, PreconditionError
from lqplab.forms import symbolic_form
from lqplab.geometry import ChartDomain, build_grid
from lqplab.hodge import DiscreteHodgeSystem, green, random_cochains
from lqplab.pde import (
    PLaplaceProblem,
    SolverOptions,
    compatibility,
    energy,
    gradient_check,
    solve,
    weak_residual,
)

CIRCLE = ChartDomain.circle()
X = sympy.Symbol("x", real=True)


def circle_problem(expression, p, resolution=256, degree=0):
    source = symbolic_form(degree, CIRCLE, [expression])
    return PLaplaceProblem.build(source, p, resolution)


def test_energy_of_sine():
    """I(sin) = (1/2) int cos^2 - int sin^2 = -pi/2 for alpha = sin and p = 2."""
    problem = circle_problem(sympy.sin(X), 2)
    theta = symbolic_form(0, CIRCLE, [sympy.sin(X)])
    assert energy(theta, problem) == pytest.approx(-math.pi / 2, abs=1e-3)


def test_compatibility_defect():
    assert circle_problem(sympy.sin(X), 3).defect.compatible
    defect = circle_problem(1 + sympy.cos(X), 3, resolution=128).defect
    assert not defect.compatible
    assert defect.pairings["1"] == pytest.approx(2 * math.pi)
    assert defect.to_dict()["compatible"] is False


def test_incompatible_source_is_refused():
    problem = circle_problem(1 + sympy.cos(X), 3, resolution=128)
    with pytest.raises(IncompatibleSource) as excinfo:
        solve(problem)
    assert excinfo.value.defect is problem.defect


def test_manufactured_four_laplacian():
    """theta = sin(x) solves delta(|d theta|^2 d theta) = 3 cos^2(x) sin(x)."""
    problem = circle_problem(3 * sympy.cos(X) ** 2 * sympy.sin(X), 4)
    theta, trace = solve(problem)
    assert trace.converged
    assert trace.energy_nonincreasing()
    assert trace.residual_regularized <= trace.tolerance
    system = problem.system
    reference = symbolic_form(0, CIRCLE, [sympy.sin(X)])
    target = system.cochain(reference.differential)
    assert system.norm(1, system.apply_d(0, theta) - target) <= 1e-4


def test_solve_past_energy_roundoff():
    """Energy differences vanish in round-off long before the residual does."""
    problem = circle_problem(3 * sympy.cos(X) ** 2 * sympy.sin(X), 4, resolution=128)
    theta, trace = solve(problem, SolverOptions(rtol=1e-11))
    assert trace.termination == "converged"
    assert trace.residual_regularized <= 1e-11
    assert trace.energy_nonincreasing()


def test_gauge_invariance():
    """Adding a constant leaves the energy of a compatible problem unchanged."""
    problem = circle_problem(3 * sympy.cos(X) ** 2 * sympy.sin(X), 4, resolution=64)
    theta = np.random.default_rng(1).standard_normal(problem.size)
    shifted = problem.energy(theta + 0.7)
    assert shifted == pytest.approx(problem.energy(theta), abs=1e-10)


def test_gradient_check():
    problem = circle_problem(3 * sympy.cos(X) ** 2 * sympy.sin(X), 4, resolution=64)
    assert gradient_check(problem, seed=3) <= 1e-5


def test_linear_case_matches_green_operator():
    problem = circle_problem(sympy.sin(2 * X) + sympy.cos(X), 2, resolution=128)
    theta, trace = solve(problem)
    expected = green(problem.system, 0, problem.alpha)
    gap = problem.system.norm(0, theta - expected) / problem.system.norm(0, expected)
    assert gap <= 1e-8


def test_linear_torus_solve_matches_codifferential_of_green():
    """At p = 2 the coexact source alpha = delta beta is solved by delta G beta."""
    torus = ChartDomain.torus([2 * math.pi, 2 * math.pi])
    system = DiscreteHodgeSystem.build(build_grid(torus, 16))
    beta = random_cochains(system, 2, 1, seed=2)[0]
    problem = PLaplaceProblem(system, 1, 2.0, 2.0, system.apply_delta(2, beta))
    assert problem.defect.compatible
    theta, trace = solve(problem)
    assert trace.converged
    expected = system.apply_delta(2, green(system, 2, beta))
    assert system.norm(1, theta - expected) <= 1e-8 * system.norm(1, expected)
    assert trace.converged


def test_gradient_method_decreases_energy():
    problem = circle_problem(3 * sympy.cos(X) ** 2 * sympy.sin(X), 4, resolution=64)
    options = SolverOptions(method="gradient", max_iterations=20)
    _, trace = solve(problem, options)
    assert trace.energy_nonincreasing()
    assert trace.energies[-1] <= trace.energies[0]
    assert len(trace.energies) == len(trace.residuals)


def test_top_degree_sources():
    """Top-degree sources must vanish: sin(x) dx is exact and therefore refused."""
    refused = circle_problem(sympy.sin(X), 3, resolution=64, degree=1)
    assert refused.defect.exact > refused.defect.tolerance
    with pytest.raises(IncompatibleSource):
        solve(refused)
    problem = circle_problem(sympy.Integer(0), 3, resolution=64, degree=1)
    theta, trace = solve(problem)
    assert trace.converged
    np.testing.assert_array_equal(theta, 0.0)
    assert compatibility(problem.alpha, problem).compatible


def test_vanishing_source_is_compatible():
    for degree in (0, 1):
        problem = circle_problem(sympy.Integer(0), 3, resolution=64, degree=degree)
        assert problem.defect.compatible
        theta, trace = solve(problem)
        assert trace.converged
        np.testing.assert_allclose(theta, 0.0, atol=1e-12)


def test_problem_preconditions():
    with pytest.raises(PreconditionError, match="circles and tori"):
        PLaplaceProblem.build(symbolic_form(0, ChartDomain.interval(0.0, 1.0), [X]), 3)
    with pytest.raises(PreconditionError, match=r"\(1, inf\)"):
        circle_problem(sympy.sin(X), 1, resolution=16)
    with pytest.raises(PreconditionError, match="Unknown solver method"):
        SolverOptions(method="newton")


def test_weak_residual():
    """At theta = 0 the residual is the source.

    Constants see nothing of a compatible source.
    """
    problem = circle_problem(sympy.sin(2 * X) + sympy.cos(X), 2, resolution=128)
    zero = np.zeros(problem.size)
    assert weak_residual(zero, problem) > 0.1
    constants = np.ones((problem.size, 1))
    assert weak_residual(zero, problem, constants) <= 1e-10
    theta, _ = solve(problem)
    assert weak_residual(theta, problem) <= 1e-6 * weak_residual(zero, problem)
