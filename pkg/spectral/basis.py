"""
Divergence-free Fourier velocity modes and scalar temperature modes on the torus.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from core.errors import InvalidInputError
from spectral.grid import TorusGrid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VelocityMode:
    """c e cos(k.x) or c e sin(k.x) with e orthogonal to k."""

    wavevector: Tuple[int, ...]
    polarization: Tuple[float, ...]
    phase: str  # "cos" | "sin"


@dataclass(frozen=True)
class TemperatureMode:
    wavevector: Tuple[int, ...]
    phase: str  # "const" | "cos" | "sin"


@dataclass
class ModeTable:
    """Mode values and analytic gradients at a set of points.

    values: (m, P) for scalar modes, (m, d, P) for vector modes
    gradients: (m, d, P) for scalar modes, (m, d, d, P) for vector modes,
        with gradients[i, a, b] = d (mode_i)_a / d x_b
    """

    values: np.ndarray
    gradients: np.ndarray


def canonical_wavevectors(dim: int, points: int) -> List[Tuple[int, ...]]:
    """Half-space wavevectors with |k_i| <= N/2 - 1, sorted by (|k|^2, lexicographic)."""
    top = points // 2 - 1
    out = []
    for k in itertools.product(range(-top, top + 1), repeat=dim):
        nonzero = [c for c in k if c != 0]
        if nonzero and nonzero[0] > 0:
            out.append(k)
    out.sort(key=lambda k: (sum(c * c for c in k), k))
    return out


def polarizations(k: Tuple[int, ...]) -> List[np.ndarray]:
    """Orthonormal vectors spanning the plane orthogonal to k."""
    kv = np.asarray(k, dtype=float)
    khat = kv / np.linalg.norm(kv)
    if kv.size == 2:
        return [np.array([-khat[1], khat[0]])]
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(kv)))] = 1.0
    e1 = axis - np.dot(axis, khat) * khat
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(khat, e1)
    return [e1, e2]


class GalerkinBasis:
    """First n velocity modes and first k temperature modes in the canonical order.

    Per wavevector the velocity modes come as cos-e1, sin-e1 (, cos-e2, sin-e2);
    the temperature list starts with the constant mode followed by cos, sin
    pairs. All modes are orthonormal in L2 of the torus.
    """

    def __init__(self, grid: TorusGrid, n_velocity: int, n_temperature: int):
        if n_velocity < 1 or n_temperature < 1:
            raise InvalidInputError("mode counts must be positive")
        self.grid = grid
        self.dim = grid.dim
        self.n = n_velocity
        self.k = n_temperature
        self.velocity_modes, self.temperature_modes = self._build_modes()
        self._tables: Dict[int, Tuple[ModeTable, ModeTable]] = {}
        logger.debug(f"[GalerkinBasis] Built {self.n} velocity and {self.k} temperature modes on {grid}")

    @property
    def velocity_norm(self) -> float:
        return float(np.sqrt(2.0 / self.grid.volume))

    @property
    def constant_value(self) -> float:
        return float(1.0 / np.sqrt(self.grid.volume))

    def _build_modes(self):
        vel: List[VelocityMode] = []
        temp: List[TemperatureMode] = [TemperatureMode((0,) * self.dim, "const")]
        for k in canonical_wavevectors(self.dim, self.grid.points):
            if len(vel) < self.n:
                for e in polarizations(k):
                    for phase in ("cos", "sin"):
                        vel.append(VelocityMode(k, tuple(e), phase))
            if len(temp) < self.k:
                temp.extend([TemperatureMode(k, "cos"), TemperatureMode(k, "sin")])
            if len(vel) >= self.n and len(temp) >= self.k:
                break
        if len(vel) < self.n:
            raise InvalidInputError(
                f"{self.n} velocity modes requested, grid N={self.grid.points} resolves {len(vel)}"
            )
        if len(temp) < self.k:
            raise InvalidInputError(
                f"{self.k} temperature modes requested, grid N={self.grid.points} resolves {len(temp)}"
            )
        return vel[: self.n], temp[: self.k]

    # -- evaluation ---------------------------------------------------------------

    def velocity_table_at(self, points: np.ndarray) -> ModeTable:
        """Velocity modes at arbitrary points of shape (P, d)."""
        points = np.asarray(points, dtype=float)
        c = self.velocity_norm
        values = np.empty((self.n, self.dim, points.shape[0]))
        grads = np.empty((self.n, self.dim, self.dim, points.shape[0]))
        for i, mode in enumerate(self.velocity_modes):
            kv = np.asarray(mode.wavevector, dtype=float)
            e = np.asarray(mode.polarization)
            phi = points @ kv
            if mode.phase == "cos":
                f, df = np.cos(phi), -np.sin(phi)
            else:
                f, df = np.sin(phi), np.cos(phi)
            values[i] = c * e[:, None] * f[None, :]
            grads[i] = c * (e[:, None] * kv[None, :])[:, :, None] * df[None, None, :]
        return ModeTable(values, grads)

    def temperature_table_at(self, points: np.ndarray) -> ModeTable:
        """Temperature modes at arbitrary points of shape (P, d)."""
        points = np.asarray(points, dtype=float)
        c = self.velocity_norm
        values = np.empty((self.k, points.shape[0]))
        grads = np.zeros((self.k, self.dim, points.shape[0]))
        for j, mode in enumerate(self.temperature_modes):
            if mode.phase == "const":
                values[j] = self.constant_value
                continue
            kv = np.asarray(mode.wavevector, dtype=float)
            phi = points @ kv
            if mode.phase == "cos":
                f, df = np.cos(phi), -np.sin(phi)
            else:
                f, df = np.sin(phi), np.cos(phi)
            values[j] = c * f
            grads[j] = c * kv[:, None] * df[None, :]
        return ModeTable(values, grads)

    def tables(self, fine: bool = False) -> Tuple[ModeTable, ModeTable]:
        """Cached (velocity, temperature) tables on the coarse or fine grid."""
        level = self.grid.fine if fine else self.grid
        if level.points not in self._tables:
            pts = level.point_list
            self._tables[level.points] = (self.velocity_table_at(pts), self.temperature_table_at(pts))
        return self._tables[level.points]

    def _level_for(self, field: np.ndarray, leading: int) -> Tuple[TorusGrid, bool]:
        spatial = field.shape[leading:]
        if spatial == self.grid.shape:
            return self.grid, False
        if spatial == self.grid.fine.shape:
            return self.grid.fine, True
        raise InvalidInputError(f"field shape {field.shape} matches neither the grid nor its fine grid")

    # -- velocity -------------------------------------------------------------------

    def _check_coefficients(self, coeffs: np.ndarray, count: int, label: str) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (count,):
            raise InvalidInputError(f"{label} must have length {count}, got shape {coeffs.shape}")
        return coeffs

    def synthesize_velocity(self, alpha: np.ndarray, fine: bool = False) -> np.ndarray:
        """u = sum_i alpha_i omega_i as a (d, N, ..., N) grid field."""
        alpha = self._check_coefficients(alpha, self.n, "alpha")
        level = self.grid.fine if fine else self.grid
        table, _ = self.tables(fine)
        return np.einsum("i,idp->dp", alpha, table.values).reshape((self.dim,) + level.shape)

    def project_velocity(self, field: np.ndarray) -> np.ndarray:
        """alpha_i = (field, omega_i) by grid quadrature."""
        field = np.asarray(field, dtype=float)
        if field.shape[0] != self.dim:
            raise InvalidInputError(f"velocity field needs {self.dim} components")
        level, fine = self._level_for(field, 1)
        table, _ = self.tables(fine)
        return level.weight * np.einsum("dp,idp->i", field.reshape(self.dim, -1), table.values)

    def velocity_gradient(self, alpha: np.ndarray, fine: bool = False) -> np.ndarray:
        """grad u with [a, b] = d u_a / d x_b, shape (d, d, N, ..., N)."""
        alpha = self._check_coefficients(alpha, self.n, "alpha")
        level = self.grid.fine if fine else self.grid
        table, _ = self.tables(fine)
        return np.einsum("i,iabp->abp", alpha, table.gradients).reshape((self.dim, self.dim) + level.shape)

    def sym_gradient(self, alpha: np.ndarray, fine: bool = False) -> np.ndarray:
        G = self.velocity_gradient(alpha, fine)
        return 0.5 * (G + np.swapaxes(G, 0, 1))

    # -- temperature -----------------------------------------------------------------

    def synthesize_temperature(self, nu: np.ndarray, fine: bool = False) -> np.ndarray:
        nu = self._check_coefficients(nu, self.k, "nu")
        level = self.grid.fine if fine else self.grid
        _, table = self.tables(fine)
        return (nu @ table.values).reshape(level.shape)

    def project_temperature(self, field: np.ndarray) -> np.ndarray:
        field = np.asarray(field, dtype=float)
        level, fine = self._level_for(field, 0)
        _, table = self.tables(fine)
        return level.weight * (table.values @ field.reshape(-1))

    # -- evaluation off the grid ---------------------------------------------------------

    def velocity_at(self, alpha: np.ndarray, points: np.ndarray) -> np.ndarray:
        """u at arbitrary points, shape (d, P)."""
        alpha = self._check_coefficients(alpha, self.n, "alpha")
        return np.einsum("i,idp->dp", alpha, self.velocity_table_at(points).values)

    def temperature_at(self, nu: np.ndarray, points: np.ndarray) -> np.ndarray:
        nu = self._check_coefficients(nu, self.k, "nu")
        return nu @ self.temperature_table_at(points).values
