"""Differential forms: representation, calculus, norms, pairings and pullbacks."""

from lqplab.forms.calculus import (
    codifferential,
    exterior_derivative,
    hodge_star,
    interior_product_values,
    probe_partials,
    wedge,
)
from lqplab.forms.form import (
    DifferentialForm,
    Representation,
    analytic_form,
    cell_average_cochain,
    constant_form,
    linear_combination,
    sample,
    sample_cochain,
    sampled_form,
    staggered_points,
    symbolic_form,
    zero_form,
)
from lqplab.forms.io import load_form, save_form
from lqplab.forms.multiindex import multi_indices
from lqplab.forms.norms import (
    FormNormReport,
    inner_product,
    lp_norm,
    pairing_integral,
    pointwise_norm,
)
from lqplab.forms.pullback import AffineMap, ChartMap, ComposedMap, pullback
from lqplab.forms.stencils import exterior_derivative_matrix

__all__ = [
    "AffineMap",
    "ChartMap",
    "ComposedMap",
    "DifferentialForm",
    "FormNormReport",
    "Representation",
    "analytic_form",
    "cell_average_cochain",
    "codifferential",
    "constant_form",
    "exterior_derivative",
    "exterior_derivative_matrix",
    "hodge_star",
    "inner_product",
    "interior_product_values",
    "linear_combination",
    "load_form",
    "lp_norm",
    "multi_indices",
    "pairing_integral",
    "pointwise_norm",
    "probe_partials",
    "pullback",
    "sample",
    "sample_cochain",
    "sampled_form",
    "save_form",
    "staggered_points",
    "symbolic_form",
    "wedge",
    "zero_form",
]
