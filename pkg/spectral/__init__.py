"""
Periodic torus discretization: grid operators and the Galerkin bases.
"""

from .grid import TorusGrid, spectral_derivatives, snapshot_rows
from .basis import GalerkinBasis, ModeTable, canonical_wavevectors, polarizations

__all__ = [
    "TorusGrid",
    "spectral_derivatives",
    "snapshot_rows",
    "GalerkinBasis",
    "ModeTable",
    "canonical_wavevectors",
    "polarizations",
]
