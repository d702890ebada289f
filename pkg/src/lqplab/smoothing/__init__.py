"""De Rham regularization on a chart ball and the associated homotopy."""

from lqplab.smoothing.deformation import (
    DeformationMap,
    DeRhamDeformation,
    RadialProfile,
    continuity_defect,
    s_v_apply,
)
from lqplab.smoothing.mollifier import DEFAULT_NODES_PER_AXIS, MollifierSpec
from lqplab.smoothing.regularize import (
    ConvergenceLadder,
    NormProbeReport,
    commutation_defect,
    compose_regularizations,
    graph_norm,
    homotopy_A,
    homotopy_A_residual,
    operator_norm_probe,
    regularization_ladder,
    regularize,
    total_variation,
)

__all__ = [
    "DeformationMap",
    "DeRhamDeformation",
    "RadialProfile",
    "continuity_defect",
    "s_v_apply",
    "DEFAULT_NODES_PER_AXIS",
    "MollifierSpec",
    "ConvergenceLadder",
    "NormProbeReport",
    "commutation_defect",
    "compose_regularizations",
    "graph_norm",
    "homotopy_A",
    "homotopy_A_residual",
    "operator_norm_probe",
    "regularization_ladder",
    "regularize",
    "total_variation",
]
