"""Text serialization of sampled forms.

Layout::

    # lqplab-form 1
    # domain {"bounds": ..., "dim": ..., "kind": ..., "periodic": ..., "radius": ...}
    # degree k
    # shape N_0 ... N_{n-1}
    # components 01 02 12
    <C rows, each with M values in C order over the grid shape>

Component labels list the multi-index digits in lexicographic order
(``-`` for the single component of a 0-form).
"""

import json
from pathlib import Path
from typing import Union

import numpy as np

from lqplab.errors import FormError
from lqplab.forms.form import DifferentialForm, sampled_form
from lqplab.geometry import ChartDomain, Grid, build_grid

MAGIC = "# lqplab-form 1"


def _label(index) -> str:
    return "".join(str(i) for i in index) or "-"


def save_form(form: DifferentialForm, grid: Grid, path: Union[str, Path]) -> None:
    """Write the samples of ``form`` on ``grid`` to ``path``."""
    values = form.values_on(grid)
    header = "\n".join(
        [
            MAGIC[2:],
            "domain " + grid.domain.to_json(),
            f"degree {form.degree}",
            "shape " + " ".join(str(s) for s in grid.shape),
            "components " + " ".join(_label(i) for i in form.multi_indices),
        ]
    )
    np.savetxt(path, values, header=header, comments="# ", fmt="%.17g")


def load_form(path: Union[str, Path], order: int = 1) -> DifferentialForm:
    """Read a sampled form written by :func:`save_form`."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise FormError(f"{path} is not an lqplab form file")
    meta = {}
    for line in lines[1:5]:
        key, _, rest = line[2:].partition(" ")
        meta[key] = rest
    domain = ChartDomain.from_dict(json.loads(meta["domain"]))
    degree = int(meta["degree"])
    shape = tuple(int(s) for s in meta["shape"].split())
    grid = build_grid(domain, shape)
    values = np.loadtxt(path, comments="#", ndmin=2)
    return sampled_form(degree, grid, values, order)
