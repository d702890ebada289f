"""Plain-text import and export of finite complexes.

Format::

    # lqplab-complex 1
    levels <N+1>
    dims <m_0> ... <m_N>
    weights <k>
    <m_k weights on one line>
    matrix <k> <rows> <cols>
    <rows lines of cols entries, row-major>

Numbers are written with ``%.17g`` so a round trip is exact.
"""

from pathlib import Path
from typing import List, Union

import numpy as np

from lqplab.complex.cochain import FiniteCochainComplex
from lqplab.errors import ComplexError

HEADER = "# lqplab-complex 1"


def _row(values) -> str:
    return " ".join("%.17g" % v for v in values)


def dumps_complex(complex_: FiniteCochainComplex) -> str:
    lines = [HEADER, f"levels {complex_.top + 1}", "dims " + _row(complex_.dims)]
    for k, w in enumerate(complex_.weights):
        lines.append(f"weights {k}")
        lines.append(_row(w))
    for k, d in enumerate(complex_.matrices):
        lines.append(f"matrix {k} {d.shape[0]} {d.shape[1]}")
        lines.extend(_row(row) for row in d)
    return "\n".join(lines) + "\n"


def loads_complex(text: str) -> FiniteCochainComplex:
    """Parse the text format.

    Raises:
        ComplexError: On a wrong header or malformed blocks.
    """
    lines = [line.strip() for line in text.splitlines()]
    if not lines or lines[0] != HEADER:
        raise ComplexError("Not an lqplab complex file")
    try:
        levels = int(lines[1].split()[1])
        dims = [int(v) for v in lines[2].split()[1:]]
        if len(dims) != levels:
            raise ComplexError("Level count does not match dims")
        cursor = 3
        weights: List[np.ndarray] = []
        for k in range(levels):
            tag = lines[cursor].split()
            if tag != ["weights", str(k)]:
                raise ComplexError(f"Expected weights block {k}")
            row = lines[cursor + 1]
            weights.append(np.array([float(v) for v in row.split()]))
            cursor += 2
        matrices: List[np.ndarray] = []
        for k in range(levels - 1):
            tag = lines[cursor].split()
            if tag[:2] != ["matrix", str(k)]:
                raise ComplexError(f"Expected matrix block {k}")
            rows, cols = int(tag[2]), int(tag[3])
            block = lines[cursor + 1 : cursor + 1 + rows]
            d = np.array([[float(v) for v in r.split()] for r in block])
            matrices.append(d.reshape(rows, cols))
            cursor += 1 + rows
    except (IndexError, ValueError) as e:
        raise ComplexError(f"Malformed complex file: {e}") from e
    return FiniteCochainComplex.from_matrices(matrices, weights)


def save_complex(complex_: FiniteCochainComplex, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps_complex(complex_), encoding="utf-8")


def load_complex(path: Union[str, Path]) -> FiniteCochainComplex:
    return loads_complex(Path(path).read_text(encoding="utf-8"))
