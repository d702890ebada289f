"""
Tests for best-constant estimates, solvability and the Hoelder embedding.
"""

import math

import pytest
import sympy

from lqplab.errors import ExponentViolation, PreconditionError
from lqplab.forms import constant_form, exterior_derivative, symbolic_form
from lqplab.geometry import ChartDomain, build_grid
from lqplab.hodge import DiscreteHodgeSystem, spectral_gap
from lqplab.sobolev import (
    TrigFamily,
    estimate_constant,
    family_from_spec,
    monotonicity_check,
    verify_solvability,
)

CIRCLE = ChartDomain.circle()
TORUS = ChartDomain.torus([2 * math.pi, 2 * math.pi])


def test_circle_constant_is_one():
    """On the unit-speed circle the best L^2 constant is 1/sqrt(lambda_1) -> 1."""
    estimate = estimate_constant(CIRCLE, 0, 2, 2, resolution=256)
    assert estimate.lower_bound == pytest.approx(1.0, abs=1e-3)
    assert estimate.exact == pytest.approx(estimate.lower_bound, rel=1e-10)
    assert estimate.best_member.startswith(("sin[1]", "cos[1]"))
    assert estimate.consistent
    assert estimate.method == "projection"


def test_corrector_constant_matches_spectral_value():
    estimate = estimate_constant(CIRCLE, 0, 2, 2, resolution=32, with_solvability=True)
    assert estimate.solvability is not None
    assert estimate.solvability.value == pytest.approx(estimate.exact, rel=1e-9)


def test_general_exponent_estimate():
    family = TrigFamily(max_degree=1)
    estimate = estimate_constant(CIRCLE, 0, 2, 4, family=family, resolution=64)
    assert estimate.method == "convex-opt"
    assert estimate.lower_bound > 0
    assert estimate.exact is None
    assert len(estimate.members) == 2


def test_estimate_rejects_inadmissible_exponents():
    with pytest.raises(ExponentViolation, match="ball"):
        estimate_constant(TORUS, 0, "4/3", 8)


def test_estimate_needs_closed_domain():
    with pytest.raises(PreconditionError, match="circle or torus"):
        estimate_constant(ChartDomain.interval(0.0, 1.0), 0, 2, 2)
    with pytest.raises(PreconditionError, match="no differential"):
        estimate_constant(CIRCLE, 1, 2, 2)


def test_family_spec():
    family = family_from_spec({"kind": "trig", "max_degree": 2, "phases": ["sin"]})
    assert len(family.members(CIRCLE, 0)) == 2
    with pytest.raises(PreconditionError, match="Unknown test family"):
        family_from_spec({"kind": "wavelet"})
    with pytest.raises(PreconditionError, match="circles and tori"):
        family.members(ChartDomain.ball(2), 0)


def test_solvability_on_circle():
    """cos(x) dx is exact; 1 + sin(2x) dx pairs nontrivially with the harmonic form."""
    x = sympy.Symbol("x", real=True)
    exact = verify_solvability(
        symbolic_form(1, CIRCLE, [sympy.cos(x)]), 2, 2, resolution=128
    )
    assert exact.solvable
    assert exact.residual < 1e-10
    assert exact.ratio > 0
    obstructed = verify_solvability(
        symbolic_form(1, CIRCLE, [1 + sympy.sin(2 * x)]), 2, 2, resolution=128
    )
    assert not obstructed.solvable
    assert obstructed.obstruction.blocking == ["int omega ^ 1"]
    assert obstructed.to_dict()["solvable"] is False


def test_solvability_on_torus():
    x, y = sympy.symbols("x y", real=True)
    omega = exterior_derivative(symbolic_form(0, TORUS, [sympy.sin(x) * sympy.cos(y)]))
    report = verify_solvability(omega, 2, 2, resolution=32)
    assert report.solvable
    assert report.residual < 1e-10
    blocked = verify_solvability(
        constant_form(1, TORUS, [1.0, 0.0]), 2, 2, resolution=16
    )
    assert blocked.obstruction.blocking == ["int <omega, dx1> dvol"]


def test_solvability_on_disc():
    x, y = sympy.symbols("x y", real=True)
    disc = ChartDomain.ball(2)
    omega = exterior_derivative(symbolic_form(0, disc, [x**2 * y]))
    report = verify_solvability(omega, 2, 2, resolution=(8, 16))
    assert report.method == "homotopy"
    assert report.bound == pytest.approx(2 * math.pi)
    assert report.ratio <= report.bound
    with pytest.raises(ExponentViolation):
        verify_solvability(omega, "4/3", 8)


def test_holder_monotonicity():
    x = sympy.Symbol("x", real=True)
    samples = [
        symbolic_form(0, CIRCLE, [sympy.sin(x)], label="sin"),
        constant_form(0, CIRCLE, [2.0]),
    ]
    check = monotonicity_check(samples, 2, 4, build_grid(CIRCLE, 128))
    assert check.holds
    assert check.factor == pytest.approx((2 * math.pi) ** 0.25)
    assert not check.entries[0].equality
    assert check.entries[1].equality


def test_holder_monotonicity_errors():
    halfplane = ChartDomain.halfplane(1.0, -1.0, 1.0)
    with pytest.raises(PreconditionError, match="infinite volume"):
        monotonicity_check([], 2, 4, build_grid(halfplane, 8))
    with pytest.raises(PreconditionError, match="q1 <= q2"):
        monotonicity_check([], 4, 2, build_grid(CIRCLE, 8))


def test_torus_one_form_constant_matches_spectral_value():
    """Coexact 1-forms on the flat torus attain 1/sqrt of the Hodge spectral gap."""
    estimate = estimate_constant(TORUS, 1, 2, 2, resolution=32)
    system = DiscreteHodgeSystem.build(build_grid(TORUS, 32))
    expected = 1.0 / math.sqrt(spectral_gap(system, 1))
    assert estimate.exact == pytest.approx(expected, rel=1e-12)
    assert estimate.lower_bound == pytest.approx(expected, rel=1e-8)
    assert estimate.consistent


def test_solvability_of_vanishing_form():
    vanishing = constant_form(1, TORUS, [0.0, 0.0])
    report = verify_solvability(vanishing, 2, 2, resolution=16)
    assert report.solvable
    assert report.ratio == 0.0
    assert report.residual == 0.0
    assert report.eta.shape == (16 * 16,)
