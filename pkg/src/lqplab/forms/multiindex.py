"""Strictly increasing multi-indices and their permutation signs."""

from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

MultiIndex = Tuple[int, ...]


@lru_cache(maxsize=None)
def multi_indices(n: int, k: int) -> Tuple[MultiIndex, ...]:
    """All increasing multi-indices of length k in range(n), lexicographic."""
    if k < 0 or k > n:
        return ()
    return tuple(combinations(range(n), k))


@lru_cache(maxsize=None)
def index_map(n: int, k: int) -> Dict[MultiIndex, int]:
    return {index: i for i, index in enumerate(multi_indices(n, k))}


def merge_sign(first: Sequence[int], second: Sequence[int]) -> int:
    """Sign of the permutation sorting the concatenation ``first + second``.

    Returns 0 when the two index sets overlap.
    """
    if set(first) & set(second):
        return 0
    inversions = sum(1 for i in first for j in second if i > j)
    return -1 if inversions % 2 else 1


def complement(n: int, index: Sequence[int]) -> MultiIndex:
    present = set(index)
    return tuple(i for i in range(n) if i not in present)


@lru_cache(maxsize=None)
def derivative_terms(n: int, k: int) -> Tuple[Tuple[int, int, int, int], ...]:
    """Terms of ``(d w)_J = sum_{j in J} (-1)^{pos(j, J)} d_j w_{J - j}``.

    Each entry is ``(target J index, source I index, axis j, sign)``.
    """
    source = index_map(n, k)
    terms: List[Tuple[int, int, int, int]] = []
    for t, target in enumerate(multi_indices(n, k + 1)):
        for pos, j in enumerate(target):
            rest = target[:pos] + target[pos + 1 :]
            terms.append((t, source[rest], j, -1 if pos % 2 else 1))
    return tuple(terms)


@lru_cache(maxsize=None)
def contraction_terms(n: int, k: int) -> Tuple[Tuple[int, int, int, int], ...]:
    """Terms of the interior product of a k-form with a vector field.

    ``(i_v w)_J = sum_{i not in J} (-1)^{pos(i, J + i)} v_i w_{J + i}``; each
    entry is ``(target J index, source K index, axis i, sign)``.
    """
    source = index_map(n, k)
    terms: List[Tuple[int, int, int, int]] = []
    for t, target in enumerate(multi_indices(n, k - 1)):
        for i in range(n):
            if i in target:
                continue
            merged = tuple(sorted(target + (i,)))
            pos = merged.index(i)
            terms.append((t, source[merged], i, -1 if pos % 2 else 1))
    return tuple(terms)
