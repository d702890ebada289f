"""Discrete Laplacian, harmonic projection, Green operator and Hodge splitting."""

from lqplab.hodge.system import (
    DiscreteHodgeSystem,
    HodgeSplit,
    IdentityReport,
    ImageIdentityReport,
    green,
    harmonic_basis,
    harmonic_dimension,
    harmonic_projection,
    hodge_decompose,
    image_identity_check,
    random_cochains,
    spectral_gap,
    verify_identities,
)

__all__ = [
    "DiscreteHodgeSystem",
    "HodgeSplit",
    "IdentityReport",
    "ImageIdentityReport",
    "green",
    "harmonic_basis",
    "harmonic_dimension",
    "harmonic_projection",
    "hodge_decompose",
    "image_identity_check",
    "random_cochains",
    "spectral_gap",
    "verify_identities",
]
