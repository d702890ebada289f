"""The differential form value type and its constructors."""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from scipy.interpolate import RegularGridInterpolator

from lqplab.errors import FormError
from lqplab.forms.multiindex import MultiIndex, derivative_terms, multi_indices
from lqplab.geometry import ChartDomain, Grid
from lqplab.geometry.grid import gauss_legendre

logger = logging.getLogger(__name__)

# Maps an (M, n) array of points to a (C, M) array of coefficients.
Evaluator = Callable[[np.ndarray], np.ndarray]
ComponentSpec = Union[Mapping[MultiIndex, object], Sequence[object]]


class Representation(str, Enum):
    ANALYTIC = "analytic"
    LAZY = "lazy"
    SAMPLED = "sampled"


@dataclass(frozen=True, eq=False)
class DifferentialForm:
    """A degree-k differential form on a chart domain.

    Coefficients are indexed by the strictly increasing multi-indices of
    length k in lexicographic order. Analytic forms evaluate closed-form
    coefficients and may carry their exact differential; lazy forms are
    results of operators (cone homotopy, regularization, pullback) evaluated
    on demand; sampled forms hold coefficient arrays on a tensor grid and
    interpolate between nodes.
    """

    degree: int
    domain: ChartDomain
    evaluator: Evaluator
    representation: Representation = Representation.LAZY
    differential: Optional["DifferentialForm"] = None
    grid: Optional[Grid] = None
    values: Optional[np.ndarray] = None
    order: int = 1
    expressions: Optional[Tuple[object, ...]] = None
    label: str = ""

    def __post_init__(self):
        n = self.domain.dim
        if not 0 <= self.degree <= n:
            raise FormError(f"Degree {self.degree} outside 0..{n}")
        differential = self.differential
        if differential is not None and differential.degree != self.degree + 1:
            raise FormError("Attached differential must have degree k + 1")
        if self.representation is Representation.SAMPLED:
            if self.grid is None or self.values is None:
                raise FormError("Sampled forms need a grid and coefficient values")
            expected = (self.n_components,) + tuple(self.grid.shape)
            if tuple(self.values.shape) != expected:
                raise FormError(
                    f"Sampled values have shape {self.values.shape}, "
                    f"expected {expected}"
                )

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def multi_indices(self) -> Tuple[MultiIndex, ...]:
        return multi_indices(self.dim, self.degree)

    @property
    def n_components(self) -> int:
        return len(self.multi_indices)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Coefficients at the points, shape (C, M)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.dim:
            raise FormError(f"Expected points of dimension {self.dim}")
        out = np.asarray(self.evaluator(pts), dtype=float)
        return np.array(np.broadcast_to(out, (self.n_components, pts.shape[0])))

    def values_on(self, grid: Grid) -> np.ndarray:
        """Coefficients at the grid nodes, shape (C, M)."""
        if self.values is not None and self.grid is grid:
            return self.values.reshape(self.n_components, -1)
        return self(grid.points)

    # ------------------------------------------------------------------
    # linear structure
    # ------------------------------------------------------------------
    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        return linear_combination([self, other], [1.0, 1.0])

    def __sub__(self, other: "DifferentialForm") -> "DifferentialForm":
        return linear_combination([self, other], [1.0, -1.0])

    def __neg__(self) -> "DifferentialForm":
        return linear_combination([self], [-1.0])

    def __mul__(self, scalar: float) -> "DifferentialForm":
        return linear_combination([self], [float(scalar)])

    __rmul__ = __mul__


def linear_combination(
    forms: Sequence[DifferentialForm], coefficients: Sequence[float]
) -> DifferentialForm:
    """``sum_i c_i w_i`` for forms of equal degree on the same domain."""
    if not forms:
        raise FormError("Empty linear combination")
    head = forms[0]
    for form in forms[1:]:
        if form.degree != head.degree or form.domain != head.domain:
            raise FormError("Linear combinations need equal degrees and domains")
    coefficients = [float(c) for c in coefficients]
    if all(f.representation is Representation.SAMPLED for f in forms) and all(
        f.grid is head.grid for f in forms
    ):
        values = sum(c * f.values for c, f in zip(coefficients, forms))
        return sampled_form(head.degree, head.grid, values, order=head.order)

    def evaluator(points: np.ndarray) -> np.ndarray:
        return sum(c * f(points) for c, f in zip(coefficients, forms))

    differential = None
    if head.degree < head.dim and all(f.differential is not None for f in forms):
        differential = linear_combination(
            [f.differential for f in forms], coefficients  # type: ignore[misc]
        )
    analytic = all(f.representation is Representation.ANALYTIC for f in forms)
    return DifferentialForm(
        head.degree,
        head.domain,
        evaluator,
        Representation.ANALYTIC if analytic else Representation.LAZY,
        differential,
    )


def _component_list(n: int, k: int, components: ComponentSpec) -> list:
    indices = multi_indices(n, k)
    if isinstance(components, Mapping):
        unknown = set(components) - set(indices)
        if unknown:
            raise FormError(f"Invalid multi-indices for degree {k}: {sorted(unknown)}")
        return [components.get(index, 0) for index in indices]
    items = list(components)
    if len(items) != len(indices):
        raise FormError(
            f"Degree-{k} form in dimension {n} needs {len(indices)} components"
        )
    return items


def _vectorize(component: object) -> Callable[[np.ndarray], np.ndarray]:
    if callable(component):
        func = component

        def evaluate(points: np.ndarray) -> np.ndarray:
            out = np.asarray(func(*points.T), dtype=float)
            return np.broadcast_to(out, (points.shape[0],))

    else:
        constant = float(component)  # type: ignore[arg-type]

        def evaluate(points: np.ndarray) -> np.ndarray:
            return np.full(points.shape[0], constant)

    return evaluate


def analytic_form(
    degree: int,
    domain: ChartDomain,
    components: ComponentSpec,
    differential: Optional[DifferentialForm] = None,
    label: str = "",
) -> DifferentialForm:
    """Form with closed-form coefficients.

    Args:
        degree: Form degree k
        domain: Chart domain
        components: Callables ``f(x0, ..., x_{n-1})`` or constants, either
            as a sequence in lexicographic multi-index order or as a mapping
            from multi-index to component (missing entries are zero)
        differential: Optional exact differential of degree k + 1
        label: Free-form description used in reports
    """
    funcs = [_vectorize(c) for c in _component_list(domain.dim, degree, components)]

    def evaluator(points: np.ndarray) -> np.ndarray:
        if not funcs:
            return np.zeros((0, points.shape[0]))
        return np.stack([f(points) for f in funcs])

    return DifferentialForm(
        degree, domain, evaluator, Representation.ANALYTIC, differential, label=label
    )


def constant_form(
    degree: int, domain: ChartDomain, coefficients: Sequence[float]
) -> DifferentialForm:
    """Constant-coefficient form with its (zero) differential attached."""
    coefficients = [float(c) for c in coefficients]
    differential = None
    if degree < domain.dim:
        differential = zero_form(degree + 1, domain)
    return analytic_form(degree, domain, coefficients, differential)


def zero_form(degree: int, domain: ChartDomain) -> DifferentialForm:
    return constant_form(degree, domain, [0.0] * len(multi_indices(domain.dim, degree)))


def default_symbols(domain: ChartDomain) -> Tuple[sympy.Symbol, ...]:
    if domain.kind == "halfplane":
        return sympy.symbols("y z", real=True)
    if domain.dim <= 3:
        return sympy.symbols("x y z", real=True)[: domain.dim]
    return sympy.symbols(f"x0:{domain.dim}", real=True)


def symbolic_form(
    degree: int,
    domain: ChartDomain,
    components: ComponentSpec,
    symbols: Optional[Sequence[sympy.Symbol]] = None,
    label: str = "",
) -> DifferentialForm:
    """Analytic form from sympy expressions with a symbolic exact differential.

    The differential is computed by ``sympy.diff`` and attached recursively,
    so ``d(d w)`` vanishes identically.
    """
    symbols = tuple(symbols) if symbols is not None else default_symbols(domain)
    n = domain.dim
    if len(symbols) != n:
        raise FormError(f"Need {n} coordinate symbols, got {len(symbols)}")
    exprs = [sympy.sympify(c) for c in _component_list(n, degree, components)]
    differential = None
    if degree < n:
        d_exprs = [sympy.Integer(0)] * len(multi_indices(n, degree + 1))
        for target, source, axis, sign in derivative_terms(n, degree):
            d_exprs[target] = d_exprs[target] + sign * sympy.diff(
                exprs[source], symbols[axis]
            )
        differential = symbolic_form(
            degree + 1, domain, [sympy.simplify(e) for e in d_exprs], symbols
        )
    funcs = [sympy.lambdify(symbols, e, modules="numpy") for e in exprs]
    form = analytic_form(degree, domain, funcs, differential, label)
    return DifferentialForm(
        form.degree,
        form.domain,
        form.evaluator,
        Representation.ANALYTIC,
        differential,
        expressions=tuple(exprs),
        label=label,
    )


def _interpolator(grid: Grid, values: np.ndarray, order: int) -> Evaluator:
    domain = grid.domain
    pad = 2 if order == 3 else 1
    axes = []
    data = np.moveaxis(values, 0, -1)
    for axis, nodes in enumerate(grid.axes):
        if domain.periodic[axis]:
            length = domain.lengths[axis]
            h = length / len(nodes)
            extended = np.concatenate(
                [
                    nodes[0] - h * np.arange(pad, 0, -1),
                    nodes,
                    nodes[-1] + h * np.arange(1, pad + 1),
                ]
            )
            widths = [(0, 0)] * data.ndim
            widths[axis] = (pad, pad)
            data = np.pad(data, widths, mode="wrap")
            axes.append(extended)
        else:
            axes.append(np.asarray(nodes))
    method = "cubic" if order == 3 else "linear"
    interp = RegularGridInterpolator(
        tuple(axes), data, method=method, bounds_error=False, fill_value=None
    )
    lows = np.array([lo for lo, _ in domain.bounds])
    lengths = np.array(domain.lengths)
    periodic = np.array(domain.periodic)

    def evaluator(points: np.ndarray) -> np.ndarray:
        pts = np.array(points, dtype=float)
        if periodic.any():
            wrapped = lows + np.mod(pts - lows, lengths)
            pts[:, periodic] = wrapped[:, periodic]
        return np.asarray(interp(pts)).T

    return evaluator


def sampled_form(
    degree: int,
    grid: Grid,
    values: np.ndarray,
    order: int = 1,
    label: str = "",
) -> DifferentialForm:
    """Form given by coefficient samples on a tensor grid.

    Args:
        degree: Form degree k
        grid: Cartesian tensor grid
        values: Array of shape (C, *grid.shape) or (C, M)
        order: Interpolation order, 1 (multilinear) or 3 (cubic)
    """
    if not grid.is_tensor:
        raise FormError("Sampled forms live on Cartesian tensor grids")
    if order not in (1, 3):
        raise FormError("Interpolation order must be 1 or 3")
    n_comp = len(multi_indices(grid.dim, degree))
    data = np.asarray(values, dtype=float).reshape((n_comp,) + tuple(grid.shape))
    data.flags.writeable = False
    return DifferentialForm(
        degree,
        grid.domain,
        _interpolator(grid, data, order),
        Representation.SAMPLED,
        None,
        grid,
        data,
        order,
        label=label,
    )


def sample(form: DifferentialForm, grid: Grid, order: int = 1) -> DifferentialForm:
    """Sample any form at the nodes of a tensor grid."""
    return sampled_form(form.degree, grid, form.values_on(grid), order, form.label)


def staggered_points(grid: Grid, index: Sequence[int]) -> np.ndarray:
    """Node positions shifted by ``h/2`` along every axis in ``index``.

    These are the locations where the forward (cochain) stencil stores the
    ``dx^I`` coefficient.
    """
    shift = np.zeros(grid.dim)
    for axis in index:
        shift[axis] = 0.5 * grid.spacing[axis]
    return grid.points + shift


def sample_cochain(form: DifferentialForm, grid: Grid) -> np.ndarray:
    """Pointwise samples at staggered positions, shape (C, M)."""
    return np.stack(
        [
            form(staggered_points(grid, index))[c]
            for c, index in enumerate(form.multi_indices)
        ]
    ).reshape(form.n_components, grid.size)


def cell_average_cochain(
    form: DifferentialForm, grid: Grid, order: int = 4
) -> np.ndarray:
    """Averages over the cells of size h centred at the staggered positions.

    Cell averages are the natural discretization of a source term for the
    staggered finite-volume energy; each average uses a tensor Gauss rule.
    """
    nodes, weights = gauss_legendre(order, -0.5, 0.5)
    offsets = np.stack(
        [m.ravel() for m in np.meshgrid(*([nodes] * grid.dim), indexing="ij")], 1
    )
    mesh = np.meshgrid(*([weights] * grid.dim), indexing="ij")
    offset_weights = np.prod(np.stack([m.ravel() for m in mesh]), axis=0)
    h = np.array(grid.spacing)
    out = np.zeros((form.n_components, grid.size))
    for c, index in enumerate(form.multi_indices):
        centres = staggered_points(grid, index)
        for offset, weight in zip(offsets, offset_weights):
            out[c] += weight * form(centres + offset * h)[c]
    return out
