"""
Tests for the discrete Hodge system on periodic grids.
"""

import math

import numpy as np
import pytest

from lqplab.errors import ComplexError
from lqplab.geometry import ChartDomain, DiagonalMetric, build_grid, conformal_rescale
from lqplab.hodge import (
    DiscreteHodgeSystem,
    green,
    harmonic_dimension,
    harmonic_projection,
    hodge_decompose,
    image_identity_check,
    random_cochains,
    spectral_gap,
    verify_identities,
)

TORUS = ChartDomain.torus([2 * math.pi, 2 * math.pi])


@pytest.fixture
def flat_system():
    return DiscreteHodgeSystem.build(build_grid(TORUS, 8))


@pytest.fixture
def curved_system():
    """A conformally rescaled torus, whose mass vectors are not constant."""

    def rho(points):
        points = np.atleast_2d(points)
        return 1.0 + 0.5 * np.cos(points[:, 0]) * np.sin(points[:, 1])

    metric = conformal_rescale(DiagonalMetric.euclidean(2), rho)
    return DiscreteHodgeSystem.build(build_grid(TORUS, 6), metric)


def test_build_needs_periodic_grid():
    box = ChartDomain.box([(0.0, 1.0), (0.0, 1.0)])
    with pytest.raises(ComplexError, match="circle or torus"):
        DiscreteHodgeSystem.build(build_grid(box, 8))


def test_flat_spectral_gap(flat_system):
    """The FFT symbol gives the smallest positive eigenvalue of the dense Laplacian."""
    h = 2 * math.pi / 8
    expected = (2.0 - 2.0 * math.cos(2 * math.pi / 8)) / h**2
    assert flat_system.uniform
    for k in range(3):
        assert spectral_gap(flat_system, k) == pytest.approx(expected, rel=1e-12)
    eigenvalues = np.linalg.eigvalsh(flat_system.laplacian_matrix(1).toarray())
    positive = eigenvalues[eigenvalues > 1e-9]
    assert positive.min() == pytest.approx(expected, rel=1e-9)


def test_harmonic_dimensions_are_binomial(flat_system, curved_system):
    for system in (flat_system, curved_system):
        assert [harmonic_dimension(system, k) for k in range(3)] == [1, 2, 1]


def test_identities_on_flat_torus(flat_system):
    for k in range(3):
        samples = random_cochains(flat_system, k, 5, seed=k)
        report = verify_identities(flat_system, k, samples, tolerance=1e-9)
        assert report.passed, report.errors


def test_identities_on_curved_torus(curved_system):
    """The conjugate gradient path satisfies the same identities."""
    assert not curved_system.uniform
    assert spectral_gap(curved_system, 1) > 0
    samples = random_cochains(curved_system, 1, 3, seed=2)
    report = verify_identities(curved_system, 1, samples, tolerance=1e-7)
    assert report.passed, report.errors


def test_green_removes_harmonic_part(flat_system):
    alpha = random_cochains(flat_system, 0, 1, seed=9)[0]
    g = green(flat_system, 0, alpha)
    np.testing.assert_allclose(harmonic_projection(flat_system, 0, g), 0.0, atol=1e-12)
    np.testing.assert_allclose(
        flat_system.apply_laplacian(0, g),
        alpha - alpha.mean(),
        atol=1e-10,
    )
    with pytest.raises(ComplexError, match="Unknown Green method"):
        green(flat_system, 0, alpha, method="multigrid")


def test_decomposition_is_orthogonal(flat_system):
    alpha = random_cochains(flat_system, 1, 1, seed=4)[0]
    split = hodge_decompose(flat_system, 1, alpha)
    assert split.reconstruction_error < 1e-10
    assert split.orthogonality_error < 1e-10
    np.testing.assert_allclose(flat_system.apply_d(1, split.exact), 0.0, atol=1e-9)


@pytest.mark.parametrize("scale", [0.0, 1e-120])
def test_decomposition_of_vanishing_cochains(flat_system, scale):
    """Errors are relative to the norm of alpha and stay finite when it vanishes."""
    for k in range(3):
        alpha = scale * random_cochains(flat_system, k, 1, seed=6)[0]
        split = hodge_decompose(flat_system, k, alpha)
        assert split.reconstruction_error <= 1e-10
        assert split.orthogonality_error <= 1e-10
        if scale == 0.0:
            total = split.exact + split.coexact + split.harmonic
            np.testing.assert_array_equal(total, 0.0)


def test_image_identity(flat_system):
    for k in range(3):
        report = image_identity_check(flat_system, k)
        assert report.holds
    top = image_identity_check(flat_system, 2)
    assert top.rank_delta == 0


def test_degree_out_of_range(flat_system):
    with pytest.raises(ComplexError, match="outside"):
        spectral_gap(flat_system, 3)
