"""Finite-difference stencils on uniform tensor grids.

Two stencils are provided. ``central4`` is the fourth-order central
difference ``[1, -8, 0, 8, -1] / 12h`` with one-sided fourth-order closures
at non-periodic ends. ``forward`` is the staggered coboundary
``(f[i+1] - f[i]) / h`` on periodic axes; a k-form sampled for it stores the
``dx^I`` coefficient at the node shifted by ``h/2`` along every axis in I, so
that it is exactly the cochain complex of the cubical grid.
"""

from typing import List

import numpy as np
import scipy.sparse as sp

from lqplab.errors import FormError
from lqplab.forms.multiindex import derivative_terms, multi_indices

STENCILS = ("central4", "forward")

_LEFT0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_LEFT1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0


def difference(
    values: np.ndarray, axis: int, h: float, periodic: bool, stencil: str
) -> np.ndarray:
    """Differentiate an array along one axis."""
    f = np.asarray(values, dtype=float)
    if stencil == "forward":
        if not periodic:
            raise FormError("The forward stencil needs a periodic axis")
        return (np.roll(f, -1, axis=axis) - f) / h
    if stencil != "central4":
        raise FormError(f"Unknown stencil '{stencil}'")
    if periodic:
        return (
            -np.roll(f, -2, axis=axis)
            + 8.0 * np.roll(f, -1, axis=axis)
            - 8.0 * np.roll(f, 1, axis=axis)
            + np.roll(f, 2, axis=axis)
        ) / (12.0 * h)
    n_nodes = f.shape[axis]
    if n_nodes < 5:
        return np.gradient(f, h, axis=axis, edge_order=2)
    g = np.moveaxis(f, axis, 0)
    out = np.empty_like(g)
    out[2:-2] = (-g[4:] + 8.0 * g[3:-1] - 8.0 * g[1:-3] + g[:-4]) / (12.0 * h)
    head = g[:5]
    tail = g[-5:][::-1]
    out[0] = np.tensordot(_LEFT0, head, axes=(0, 0)) / h
    out[1] = np.tensordot(_LEFT1, head, axes=(0, 0)) / h
    out[-1] = -np.tensordot(_LEFT0, tail, axes=(0, 0)) / h
    out[-2] = -np.tensordot(_LEFT1, tail, axes=(0, 0)) / h
    return np.moveaxis(out, 0, axis)


def difference_matrix(n_nodes: int, h: float, periodic: bool, stencil: str):
    """Sparse 1-D difference matrix matching :func:`difference`."""
    eye = np.eye(n_nodes)
    dense = difference(eye, 0, h, periodic, stencil)
    return sp.csr_matrix(dense)


def exterior_derivative_matrix(grid, k: int, stencil: str = "forward"):
    """Sparse matrix of d on k-form coefficient vectors of a tensor grid.

    Vectors are component-major: entry ``c * M + node`` holds component c of
    the lexicographic multi-index list at the C-ordered node.
    """
    if not grid.is_tensor:
        raise FormError("Difference matrices need a Cartesian tensor grid")
    n = grid.dim
    if not 0 <= k < n:
        raise FormError(f"No exterior derivative from degree {k} in dimension {n}")
    shape = grid.shape
    spacing = grid.spacing
    partials = []
    for axis in range(n):
        factors: List[sp.spmatrix] = [sp.identity(m, format="csr") for m in shape]
        factors[axis] = difference_matrix(
            shape[axis], spacing[axis], grid.domain.periodic[axis], stencil
        )
        op = factors[0]
        for fac in factors[1:]:
            op = sp.kron(op, fac, format="csr")
        partials.append(op)
    rows = len(multi_indices(n, k + 1))
    cols = len(multi_indices(n, k))
    blocks: List[List] = [[None] * cols for _ in range(rows)]
    for target, source, axis, sign in derivative_terms(n, k):
        block = sign * partials[axis]
        if blocks[target][source] is None:
            blocks[target][source] = block
        else:
            blocks[target][source] = blocks[target][source] + block
    m = grid.size
    for r in range(rows):
        for c in range(cols):
            if blocks[r][c] is None:
                blocks[r][c] = sp.csr_matrix((m, m))
    return sp.bmat(blocks, format="csr")
