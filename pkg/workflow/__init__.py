"""
Run orchestration: the simulation loop and refinement studies.
"""

from .simulation import Simulation, Trajectory, run
from .refinement import RefinementReport, parse_ladder, refine_study

__all__ = ["Simulation", "Trajectory", "run", "RefinementReport", "parse_ladder", "refine_study"]
