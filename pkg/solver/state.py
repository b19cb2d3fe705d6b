"""
Run inputs and the evolving state of the two-level Galerkin system.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from core.constitutive import HeatFluxModel, HypothesisVerdict, StressModel
from core.errors import InvalidInputError
from core.nfunction import ConjugateParams
from spectral.basis import GalerkinBasis
from spectral.grid import TWO_PI, TorusGrid

logger = logging.getLogger(__name__)

# f(t, coords) with coords of shape (d, ...) returning a field of the same shape
Forcing = Callable[[float, np.ndarray], np.ndarray]

DIVERGENCE_TOL = 1e-8


def default_epsilon(points: int) -> float:
    """Artificial viscosity 1e-3 (2pi/N)^2."""
    return 1e-3 * (TWO_PI / points) ** 2


@dataclass
class InitialData:
    """Initial density, velocity and temperature on the grid plus the forcing."""

    rho0: np.ndarray
    u0: np.ndarray
    theta0: np.ndarray
    rho_low: float
    rho_high: float
    theta_low: float
    forcing: Optional[Forcing] = None

    def validate(self, grid: TorusGrid) -> None:
        """Check shapes, finiteness, positivity of the floors and div u0 = 0."""
        self.rho0 = np.asarray(self.rho0, dtype=float)
        self.u0 = np.asarray(self.u0, dtype=float)
        self.theta0 = np.asarray(self.theta0, dtype=float)
        if self.rho0.shape != grid.shape or self.theta0.shape != grid.shape:
            raise InvalidInputError(f"rho0 and theta0 must have grid shape {grid.shape}")
        if self.u0.shape != (grid.dim,) + grid.shape:
            raise InvalidInputError(f"u0 must have shape {(grid.dim,) + grid.shape}, got {self.u0.shape}")
        for label, values in (("rho0", self.rho0), ("u0", self.u0), ("theta0", self.theta0)):
            if not np.all(np.isfinite(values)):
                raise InvalidInputError(f"{label} has non-finite values")
        if not 0 < self.rho_low <= self.rho_high:
            raise InvalidInputError(f"need 0 < rho_low <= rho_high, got [{self.rho_low}, {self.rho_high}]")
        if not self.theta_low > 0:
            raise InvalidInputError(f"theta_low must be positive, got {self.theta_low}")
        div = grid.divergence(self.u0)
        scale = 1.0 + float(np.max(np.abs(self.u0))) * grid.points
        if float(np.max(np.abs(div))) > DIVERGENCE_TOL * scale:
            raise InvalidInputError(f"u0 is not divergence-free (max |div u0| = {np.max(np.abs(div)):.3e})")

    def resampled(self, source: TorusGrid, target: TorusGrid) -> "InitialData":
        """The same data spectrally interpolated onto another grid."""
        if source.dim != target.dim:
            raise InvalidInputError("cannot resample across dimensions")
        return replace(
            self,
            rho0=source.resample(self.rho0, target.points),
            u0=source.resample(self.u0, target.points),
            theta0=source.resample(self.theta0, target.points),
        )


@dataclass
class SimConfig:
    """Everything a run needs.

    Attributes:
        grid: Torus grid (carries the oversampling factor)
        stress: Stress model with its N-function
        heat: Heat-flux model
        initial_data: Initial fields and forcing
        T: Final time
        dt: Time step
        epsilon: Artificial viscosity (None selects the grid default)
        n_velocity: Velocity mode count n
        n_temperature: Temperature mode count k
        cadence: Steps between stored records
        viscous_heating: Whether S:Du feeds the temperature equation
    """

    grid: TorusGrid
    stress: StressModel
    heat: HeatFluxModel
    initial_data: InitialData
    T: float = 1.0
    dt: float = 1e-2
    epsilon: Optional[float] = None
    n_velocity: int = 16
    n_temperature: int = 16
    cadence: int = 1
    cfl_limit: float = 0.5
    viscous_heating: bool = True
    thermal_lambda: float = 0.5
    luxemburg_stride: int = 10
    bounds_tol: float = 0.01
    mass_tol: float = 1e-10
    seed: int = 0
    conjugate_params: ConjugateParams = field(default_factory=ConjugateParams)
    verdict: Optional[HypothesisVerdict] = None
    name: str = "run"
    epsilon_defaulted: bool = field(init=False, default=False)

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidInputError(f"dt must be positive, got {self.dt}")
        if self.T < self.dt * (1.0 - 1e-12):
            raise InvalidInputError(f"T = {self.T} must be at least dt = {self.dt}")
        self.epsilon_defaulted = self.epsilon is None
        if self.epsilon is None:
            self.epsilon = default_epsilon(self.grid.points)
        if self.epsilon < 0:
            raise InvalidInputError(f"epsilon must be nonnegative, got {self.epsilon}")
        if self.epsilon == 0:
            logger.warning("[SimConfig] epsilon = 0: density bounds rely on spectral accuracy alone")
        if self.cadence < 1 or self.luxemburg_stride < 1:
            raise InvalidInputError("cadence and luxemburg_stride must be positive")
        if not self.cfl_limit > 0:
            raise InvalidInputError(f"cfl_limit must be positive, got {self.cfl_limit}")
        if not 0 < self.thermal_lambda < 1:
            raise InvalidInputError(f"thermal_lambda must lie in (0, 1), got {self.thermal_lambda}")
        if self.stress.dim != self.grid.dim:
            raise InvalidInputError(f"stress model is {self.stress.dim}-D, grid is {self.grid.dim}-D")
        self.initial_data.validate(self.grid)

    @property
    def n_steps(self) -> int:
        return int(np.ceil(self.T / self.dt - 1e-9))

    def step_size(self, index: int) -> float:
        """Length of step `index`; the last step ends exactly at T."""
        if index < self.n_steps - 1:
            return self.dt
        return self.T - self.dt * (self.n_steps - 1)

    def with_updates(self, **changes) -> "SimConfig":
        """Copy with some fields changed; a new point count resamples the data."""
        if "points" in changes:
            points = int(changes.pop("points"))
            grid = TorusGrid(self.grid.dim, points, self.grid.oversample)
            changes["grid"] = grid
            changes["initial_data"] = self.initial_data.resampled(self.grid, grid)
            if self.epsilon_defaulted and "epsilon" not in changes:
                changes["epsilon"] = None
        elif self.epsilon_defaulted and "epsilon" not in changes:
            changes["epsilon"] = None
        return replace(self, **changes)


@dataclass
class SimState:
    """t, rho on the grid, velocity coefficients alpha, temperature coefficients nu."""

    t: float
    rho: np.ndarray
    alpha: np.ndarray
    nu: np.ndarray

    def copy(self) -> "SimState":
        return SimState(self.t, self.rho.copy(), self.alpha.copy(), self.nu.copy())

    def is_finite(self) -> bool:
        return bool(
            np.isfinite(self.t)
            and np.all(np.isfinite(self.rho))
            and np.all(np.isfinite(self.alpha))
            and np.all(np.isfinite(self.nu))
        )


class SimContext:
    """Immutable per-run objects shared by the steppers and the diagnostics."""

    def __init__(self, config: SimConfig):
        self.config = config
        self.grid = config.grid
        self.basis = GalerkinBasis(config.grid, config.n_velocity, config.n_temperature)
        self.stress = config.stress
        self.heat = config.heat
        self.data = config.initial_data
        self.epsilon = float(config.epsilon)
        self._zero_forcing = {}

    @property
    def dim(self) -> int:
        return self.grid.dim

    def level(self, fine: bool) -> TorusGrid:
        return self.grid.fine if fine else self.grid

    def forcing(self, t: float, fine: bool = True) -> np.ndarray:
        """f(t, .) at the points of the coarse or fine grid, shape (d, P)."""
        level = self.level(fine)
        if self.data.forcing is None:
            if fine not in self._zero_forcing:
                self._zero_forcing[fine] = np.zeros((self.dim, level.size))
            return self._zero_forcing[fine]
        values = np.asarray(self.data.forcing(t, level.coords), dtype=float)
        return np.broadcast_to(values, (self.dim,) + level.shape).reshape(self.dim, -1)

    def initial_state(self) -> SimState:
        """rho = rho0, alpha = P_n u0, nu = P_k theta0."""
        return SimState(
            t=0.0,
            rho=self.data.rho0.copy(),
            alpha=self.basis.project_velocity(self.data.u0),
            nu=self.basis.project_temperature(self.data.theta0),
        )
