"""
Tests for finite cochain complexes and their best constants.
"""

import math

import numpy as np
import pytest

from lqplab.complex import (
    FiniteCochainComplex,
    certificate_ratio,
    cohomology_dimension,
    corrector_constant,
    discretize,
    image_constant,
    load_complex,
    quotient_monotonicity,
    random_complex,
    save_complex,
    solvability_constant,
    torsion_check,
)
from lqplab.errors import ComplexError
from lqplab.geometry import ChartDomain, DiagonalMetric, build_grid


def cyclic_difference(size: int) -> np.ndarray:
    """``(D u)_i = u_{i+1} - u_i`` with periodic wrap."""
    return np.roll(np.eye(size), 1, axis=1) - np.eye(size)


def test_random_complex_cohomology():
    """With prescribed ranks, H^k = m_k - r_k - r_{k-1}."""
    complex_ = random_complex([3, 5, 4], np.random.default_rng(1), ranks=[2, 2])
    assert [cohomology_dimension(complex_, k) for k in range(3)] == [1, 1, 2]


def test_torsion_vanishes_at_every_level():
    complex_ = random_complex([4, 6, 6, 3], np.random.default_rng(5))
    for k in range(4):
        report = torsion_check(complex_, k)
        assert report.is_zero
        assert report.cohomology_dimension == cohomology_dimension(complex_, k)
        assert report.dimension <= report.cohomology_dimension


def test_cyclic_solvability_constant():
    """On the 4-cycle with unit weights the constant is 1/sqrt(2)."""
    complex_ = FiniteCochainComplex.from_matrices([cyclic_difference(4)])
    report = solvability_constant(complex_, 1)
    assert report.method == "svd"
    assert report.value == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-12)
    assert report.cohomology == 1
    assert certificate_ratio(complex_, report) == pytest.approx(report.value, rel=1e-10)


@pytest.mark.parametrize("size", [3, 4, 7, 16, 33])
def test_cyclic_corrector_constant(size):
    """The least nonzero singular value of the cyclic difference is 2 sin(pi / N)."""
    complex_ = FiniteCochainComplex.from_matrices([cyclic_difference(size)])
    expected = 1.0 / (2.0 * math.sin(math.pi / size))
    assert corrector_constant(complex_, 1).value == pytest.approx(expected, rel=1e-10)
    assert solvability_constant(complex_, 1).value == pytest.approx(expected, rel=1e-10)


def test_closed_scope_is_infinite_with_cohomology():
    complex_ = FiniteCochainComplex.from_matrices([cyclic_difference(4)])
    report = solvability_constant(complex_, 1, scope="closed")
    assert math.isinf(report.value)


def test_optimizer_agrees_with_svd():
    """The convex optimization path reproduces the SVD answer at p = q = 2."""
    complex_ = random_complex([3, 4], np.random.default_rng(2), ranks=[2])
    exact = solvability_constant(complex_, 1)
    optimized = solvability_constant(complex_, 1, method="convex-opt", seed=4)
    assert optimized.method == "convex-opt"
    assert optimized.value == pytest.approx(exact.value, rel=1e-4)


def test_optimizer_agrees_with_brute_force_on_wide_map():
    complex_ = random_complex([8, 5], np.random.default_rng(11), ranks=[5])
    optimized = solvability_constant(complex_, 1, p="3/2", q=3, seed=0)
    sampled = solvability_constant(
        complex_, 1, p="3/2", q=3, method="brute-force", seed=0
    )
    assert optimized.method == "convex-opt"
    assert optimized.value == pytest.approx(sampled.value, rel=1e-4)


@pytest.mark.parametrize("seed", range(25))
def test_optimizer_agrees_with_brute_force(seed):
    """General-exponent constants match dense sampling on small random complexes."""
    rng = np.random.default_rng(100 + seed)
    dims = [int(m) for m in rng.integers(2, 7, size=2)]
    rank = int(rng.integers(1, min(dims) + 1))
    complex_ = random_complex(dims, rng, ranks=[rank])
    optimized = solvability_constant(complex_, 1, p="3/2", q=3, seed=seed)
    sampled = solvability_constant(
        complex_, 1, p="3/2", q=3, method="brute-force", seed=seed
    )
    assert optimized.value == pytest.approx(sampled.value, rel=1e-4)


def test_corrector_bounded_by_twice_image_constant():
    complex_ = random_complex([4, 5, 3], np.random.default_rng(8), ranks=[3, 2])
    for p, q in ((2, 2), (3, 3)):
        corrector = corrector_constant(complex_, 1, p, q, seed=1)
        gamma = image_constant(complex_, 1, p, q, seed=1)
        assert corrector.value <= 2.0 * gamma.value * (1 + 1e-6)


def test_general_exponent_certificate():
    """The certificate of an optimized constant reproduces its value."""
    complex_ = random_complex([3, 4], np.random.default_rng(3), ranks=[2])
    report = solvability_constant(complex_, 1, p=3, q="3/2", seed=0)
    assert report.value > 0
    assert certificate_ratio(complex_, report) == pytest.approx(report.value, rel=1e-5)


def test_zero_map_is_unreachable():
    complex_ = FiniteCochainComplex.from_matrices([np.zeros((2, 3))])
    report = solvability_constant(complex_, 1)
    assert not report.reachable
    assert report.value == 0.0


def test_discretized_torus_cohomology():
    """The staggered complex of a torus grid has Betti numbers 1, 2, 1."""
    torus = ChartDomain.torus([2 * math.pi, 2 * math.pi])
    grid = build_grid(torus, 6)
    complex_ = discretize(torus, DiagonalMetric.euclidean(2), grid)
    assert complex_.dims == (36, 72, 36)
    assert [cohomology_dimension(complex_, k) for k in range(3)] == [1, 2, 1]


def test_discretize_needs_closed_domain():
    box = ChartDomain.box([(0.0, 1.0), (0.0, 1.0)])
    with pytest.raises(ComplexError, match="closed domain"):
        discretize(box, DiagonalMetric.euclidean(2), build_grid(box, 6))


def test_complex_validation_errors():
    with pytest.raises(ComplexError, match="does not vanish"):
        FiniteCochainComplex.from_matrices([np.ones((2, 2)), np.ones((2, 2))])
    with pytest.raises(ComplexError, match="strictly positive"):
        FiniteCochainComplex.from_matrices([np.eye(2)], [np.ones(2), np.zeros(2)])
    with pytest.raises(ComplexError, match="at least one map"):
        FiniteCochainComplex.from_matrices([])
    with pytest.raises(ComplexError, match="at least two levels"):
        random_complex([3], np.random.default_rng(0))
    complex_ = FiniteCochainComplex.from_matrices([np.eye(2)])
    with pytest.raises(ComplexError, match="outside"):
        cohomology_dimension(complex_, 2)
    with pytest.raises(ComplexError, match="start at level 1"):
        corrector_constant(complex_, 0)
    with pytest.raises(ComplexError, match="q1 <= q2"):
        quotient_monotonicity(complex_, 1, 2, 4, 2)


def test_complex_file(tmp_path):
    complex_ = random_complex([2, 3, 2], np.random.default_rng(6), ranks=[1, 1])
    path = tmp_path / "complex.txt"
    save_complex(complex_, path)
    loaded = load_complex(path)
    assert loaded.dims == complex_.dims
    np.testing.assert_allclose(loaded.matrices[1], complex_.matrices[1])
    (tmp_path / "bad.txt").write_text("hello\n", encoding="utf-8")
    with pytest.raises(ComplexError, match="Not an lqplab complex file"):
        load_complex(tmp_path / "bad.txt")
