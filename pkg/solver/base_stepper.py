import logging
from typing import Callable

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from core.errors import FatalDiagnosticError
from solver.state import SimContext


class BaseStepper:
    """Base class for the substeps of one time step."""

    def __init__(self, name: str, context: SimContext):
        """Initialize the stepper.

        Args:
            name: The name of the stepper.
            context: Shared per-run objects (grid, basis, models).
        """
        self.name = name
        self.context = context
        self.logger = logging.getLogger(name)

    def log(self, message):
        self.logger.debug(f"[{self.name}] {message}")

    def factor(self, matrix: np.ndarray, t: float):
        """Cholesky factor of a Galerkin mass matrix.

        Raises:
            FatalDiagnosticError: If the matrix is not positive definite
        """
        try:
            return cho_factor(matrix, lower=True, check_finite=True)
        except (LinAlgError, ValueError) as e:
            self.logger.error(f"[{self.name}] Mass matrix lost positive definiteness at t={t:.6g}")
            raise FatalDiagnosticError(
                f"{self.name}: mass matrix not positive definite at t={t:.6g} "
                f"(density left its bounds?): {e}"
            ) from e

    @staticmethod
    def solve(factor, rhs: np.ndarray) -> np.ndarray:
        return cho_solve(factor, rhs, check_finite=False)

    @staticmethod
    def heun(
        y: np.ndarray,
        dt: float,
        first: Callable[[np.ndarray], np.ndarray],
        second: Callable[[np.ndarray], np.ndarray],
    ) -> np.ndarray:
        """Explicit trapezoid (Heun): first stage slope at y, second at the Euler predictor."""
        k1 = first(y)
        k2 = second(y + dt * k1)
        return y + 0.5 * dt * (k1 + k2)

    def step(self, *args, **kwargs):
        raise NotImplementedError("Subclasses must implement `step()`")
