"""Fidelity-based measurement-induced nonlocality for bipartite quantum states."""

from .nonlocality import (
    MeasureReport,
    bound_gamma,
    bound_S,
    closed_2xn,
    closed_bell_diagonal,
    closed_pure,
    compute,
    fidelity,
    fmin_one_sided,
    fmin_two_sided,
    geometric_discord,
    hs_min,
)
from .searchopt import OptimizerConfig
from .states import BellDiagonalParams, DensityMatrix

__version__ = "0.1.0"

__all__ = [
    "BellDiagonalParams",
    "DensityMatrix",
    "MeasureReport",
    "OptimizerConfig",
    "bound_S",
    "bound_gamma",
    "closed_2xn",
    "closed_bell_diagonal",
    "closed_pure",
    "compute",
    "fidelity",
    "fmin_one_sided",
    "fmin_two_sided",
    "geometric_discord",
    "hs_min",
]
