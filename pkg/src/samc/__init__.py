"""Samplers and checks for the augmented multiplicative coalescent at
critical scaling: multigraph, breadth-first walk, Brownian grid limit and
exact jump chain."""

__version__ = "0.1.0"

from .core import (
    AugmentedPartition,
    InvalidInputError,
    MassPartition,
    ScalingParams,
    canonicalize,
    du_distance,
    l2_distance,
    p_of_time,
)

__all__ = [
    "AugmentedPartition",
    "InvalidInputError",
    "MassPartition",
    "ScalingParams",
    "canonicalize",
    "du_distance",
    "l2_distance",
    "p_of_time",
    "__version__",
]
