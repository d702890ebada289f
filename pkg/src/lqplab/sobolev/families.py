"""Declarative test families for best-constant estimates."""

import itertools
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import numpy as np

from lqplab.errors import PreconditionError
from lqplab.forms.form import DifferentialForm, analytic_form
from lqplab.forms.multiindex import multi_indices
from lqplab.geometry import ChartDomain

FAMILY_KINDS = ("trig",)


def _frequencies(n: int, max_degree: int) -> List[Tuple[int, ...]]:
    """Nonzero integer frequency vectors up to sign, sup-norm <= max_degree."""
    out = []
    for m in itertools.product(range(-max_degree, max_degree + 1), repeat=n):
        nonzero = [v for v in m if v != 0]
        if nonzero and nonzero[0] > 0:
            out.append(tuple(m))
    return out


def _wave(wavenumbers: np.ndarray, phase: str):
    trig = np.sin if phase == "sin" else np.cos

    def component(*coords):
        return trig(sum(k * x for k, x in zip(wavenumbers, coords)))

    return component


@dataclass(frozen=True)
class TrigFamily:
    """Trigonometric k-forms ``sin(m . x) dx^I`` and ``cos(m . x) dx^I``.

    Frequencies are the integer vectors m with ``max |m_i| <= max_degree``
    scaled to the domain period; each multi-index I gets its own member.
    """

    max_degree: int = 3
    phases: Tuple[str, ...] = ("sin", "cos")

    def __post_init__(self):
        if self.max_degree < 1:
            raise PreconditionError("Trigonometric families need max_degree >= 1")
        if not set(self.phases) <= {"sin", "cos"} or not self.phases:
            raise PreconditionError(f"Unknown phases {self.phases}")

    def members(self, domain: ChartDomain, k: int) -> List[DifferentialForm]:
        if not domain.is_closed:
            raise PreconditionError("Trigonometric families live on circles and tori")
        n = domain.dim
        scale = np.array([2.0 * math.pi / length for length in domain.lengths])
        forms = []
        for m in _frequencies(n, self.max_degree):
            wavenumbers = scale * np.array(m, dtype=float)
            for phase in self.phases:
                for index in multi_indices(n, k):
                    label = f"{phase}{list(m)} dx{list(index)}"
                    forms.append(
                        analytic_form(
                            k, domain, {index: _wave(wavenumbers, phase)}, label=label
                        )
                    )
        return forms

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": "trig",
            "max_degree": self.max_degree,
            "phases": list(self.phases),
        }


def family_from_spec(spec: Dict[str, Any]) -> TrigFamily:
    kind = spec.get("kind", "trig")
    if kind not in FAMILY_KINDS:
        raise PreconditionError(f"Unknown test family '{kind}'")
    return TrigFamily(
        int(spec.get("max_degree", 3)), tuple(spec.get("phases", ("sin", "cos")))
    )
