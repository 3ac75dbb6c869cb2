"""Quantum input-output relations for dispersive, lossy multilayer plates."""

from .errors import QplateError
from .media import (
    MediumModel,
    RefractiveIndex,
    SingleResonance,
    Tabulated,
    Vacuum,
    lossless,
    permittivity,
    refractive_index,
)
from .slab import SlabConfig, TwoPortMatrices, green_function, single_slab_matrices
from .stack import LayerStack, conservation_residuals, stack_matrices

__all__ = [
    "QplateError",
    "MediumModel",
    "RefractiveIndex",
    "SingleResonance",
    "Tabulated",
    "Vacuum",
    "lossless",
    "permittivity",
    "refractive_index",
    "SlabConfig",
    "TwoPortMatrices",
    "green_function",
    "single_slab_matrices",
    "LayerStack",
    "conservation_residuals",
    "stack_matrices",
]

__version__ = "0.1.0"
