"""
Time stepping of the Galerkin system: density, momentum and temperature substeps.
"""

from .state import InitialData, SimConfig, SimContext, SimState, default_epsilon
from .base_stepper import BaseStepper
from .density import DensityStepper
from .momentum import MomentumStepper
from .temperature import TemperatureStepper

__all__ = [
    "InitialData",
    "SimConfig",
    "SimContext",
    "SimState",
    "default_epsilon",
    "BaseStepper",
    "DensityStepper",
    "MomentumStepper",
    "TemperatureStepper",
]
