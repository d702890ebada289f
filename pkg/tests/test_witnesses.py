"""
Tests for the explicit witnesses on the ball, the hyperbolic plane and the line.
"""

import math

import pytest

from lqplab.errors import EmptyMuInterval, PreconditionError
from lqplab.geometry import ExponentPair
from lqplab.witnesses import (
    BallWitnessConfig,
    Verdict,
    ball_witness,
    ball_witness_for,
    hyperbolic_nonvanishing,
    hyperbolic_witnesses,
    line_gaussian_bound,
    line_gaussian_ladder,
    line_plateau_bound,
    line_plateau_ladder,
    line_reduced_approx,
    line_reduced_ladder,
    mu_interval,
    sequence_certificate,
)


def test_mu_interval():
    assert mu_interval(2, 1, ExponentPair.of("4/3", 8)) == pytest.approx((-0.5, -0.25))
    low, high = mu_interval(2, 1, ExponentPair.of(2, 2))
    assert low >= high


def test_ball_witness_nonvanishing():
    """p = 4/3, q = 8 on the disc: alpha is in L^p, pairings stay near -1."""
    report = ball_witness_for("4/3", 8)
    assert report.verdict is Verdict.NONVANISHING
    assert report.passed
    assert report.parameters["mu"] == pytest.approx(-0.375)
    signed = report.pairings["signed_t=0.0001"]
    assert signed < 0
    assert abs(signed) >= report.tolerances["pairing_floor"]
    exact = report.norms["alpha_Lp_exact"]
    assert report.norms["alpha_Lp_quadrature"] == pytest.approx(exact, rel=1e-4)
    assert report.ratio < 1.0


def test_ball_witness_refuses_sobolev_range():
    """For 1/p - 1/q <= 1/2 the mu interval is empty."""
    with pytest.raises(EmptyMuInterval) as excinfo:
        BallWitnessConfig(2.0, 2.0)
    low, high = excinfo.value.interval
    assert low == pytest.approx(0.0)
    assert high == pytest.approx(-1.0)


def test_ball_witness_config_validation():
    with pytest.raises(PreconditionError, match="outside"):
        BallWitnessConfig(4.0 / 3.0, 8.0, mu=0.0)
    with pytest.raises(PreconditionError, match="strictly decreasing"):
        BallWitnessConfig(4.0 / 3.0, 8.0, t_ladder=(1e-3, 1e-2))
    with pytest.raises(PreconditionError, match="n = 2, k = 1"):
        BallWitnessConfig(1.1, 100.0, n=3, k=1)


def test_sequence_certificate():
    assert all(sequence_certificate([-0.9, -0.99], [1.0, 0.5], 0.5).values())
    rising = sequence_certificate([-0.9, -0.1], [1.0, 0.5], 0.5)
    assert not rising["pairing_bounded_below"]
    flat = sequence_certificate([-0.9, -0.9], [1.0, 1.0], 0.5)
    assert not flat["differential_decreasing"]


def test_hyperbolic_witnesses():
    """f and g satisfy every defining property; the pairing of df and dg is one."""
    witnesses = hyperbolic_witnesses(exponents=(2.0,))
    report = witnesses.report
    assert report.passed, report.checks
    assert report.verdict is Verdict.LOWER_BOUND
    assert report.pairings["df_dg"] == pytest.approx(1.0, abs=1e-6)


def test_hyperbolic_nonvanishing():
    report = hyperbolic_nonvanishing(2, 2)
    assert report.verdict is Verdict.REDUCED_NONVANISHING
    assert report.pairings["alpha_gamma"] == pytest.approx(1.0, abs=1e-6)
    assert abs(report.pairings["alpha_translated_gamma"]) <= 1e-14
    with pytest.raises(PreconditionError, match="1 < q < inf"):
        hyperbolic_nonvanishing(2, "inf")


def test_line_plateau_bound():
    report = line_plateau_bound(10.0, 2, 2)
    assert report.verdict is Verdict.LOWER_BOUND
    assert report.passed
    assert report.bound == pytest.approx(2.0**-1.5 * 3.0)
    assert report.ratio >= report.bound
    with pytest.raises(PreconditionError, match="a > 1"):
        line_plateau_bound(1.0, 2, 2)
    assert line_plateau_bound(10.0, 2, "inf").verdict is Verdict.EXCLUDED


def test_line_plateau_ladder_grows():
    reports = line_plateau_ladder([10.0, 100.0, 1000.0], 2, 4)
    assert all(r.checks["ladder_nondecreasing"] for r in reports)
    assert reports[-1].ratio > reports[0].ratio


def test_line_gaussian_bound():
    report = line_gaussian_bound(1.0, 2)
    assert report.passed
    assert report.norms["gap_closed"] == pytest.approx(0.5)
    assert report.norms["g_p_closed"] == pytest.approx(2.0**-0.25)


def test_line_gaussian_ladder_exponent():
    """The ratio grows like kappa^{1/(2p) - 1/2} as kappa shrinks."""
    report = line_gaussian_ladder([1.0, 0.1, 0.01], 2)
    assert report.checks["exponent_matches"]
    assert report.norms["expected_exponent"] == pytest.approx(-0.25)
    assert report.norms["fitted_exponent"] == pytest.approx(-0.25, abs=1e-6)


def test_line_reduced_approximation():
    """A Gaussian 1-form is approximated by differentials of compact support."""
    reports = line_reduced_ladder(lambda x: math.exp(-x * x), [1.0, 2.0, 4.0], 2)
    for report in reports:
        assert report.verdict is Verdict.VANISHING_EVIDENCE
        assert report.passed
        expected = 1.0 / (2.0 * report.parameters["m"])
        assert report.norms["lambda_p"] == pytest.approx(expected)


def test_line_reduced_refuses_p_one():
    with pytest.raises(PreconditionError, match="1 < p < inf"):
        line_reduced_approx(lambda x: math.exp(-x * x), 1.0, 1)


def test_ball_witness_default_mu():
    """Without an explicit mu the midpoint of the admissible interval is used."""
    config = BallWitnessConfig(4.0 / 3.0, 8.0, t_ladder=(1e-2, 1e-3))
    assert config.mu == pytest.approx(-0.375)
    report = ball_witness(config)
    assert report.verdict is Verdict.NONVANISHING
    assert len(report.pairings) >= 2
