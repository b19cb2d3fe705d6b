"""
Periodic torus grid with spectral differentiation, quadrature and
oversampled (pseudo-spectral) evaluation of nonlinear terms.
"""

import logging
from functools import cached_property
from typing import Dict, Tuple

import numpy as np
from scipy import fft as sfft

from core.errors import InvalidInputError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


class TorusGrid:
    """Uniform grid on the torus [0, 2pi)^d.

    Fields are arrays whose trailing d axes are the grid axes; any leading
    axes (vector or tensor components) are carried along by every operator.
    """

    def __init__(self, dim: int = 2, points: int = 32, oversample: int = 2):
        """Initialize the grid.

        Args:
            dim: Spatial dimension (2 or 3)
            points: Points per dimension N (even, at least 8)
            oversample: Fine-grid factor for nonlinear evaluation
        """
        if dim not in (2, 3):
            raise InvalidInputError(f"dimension must be 2 or 3, got {dim}")
        if points < 8 or points % 2:
            raise InvalidInputError(f"points per dimension must be even and >= 8, got {points}")
        if oversample < 1:
            raise InvalidInputError(f"oversample must be >= 1, got {oversample}")
        self.dim = dim
        self.points = points
        self.oversample = oversample

    def __repr__(self) -> str:
        return f"TorusGrid(dim={self.dim}, points={self.points}, oversample={self.oversample})"

    def __eq__(self, other) -> bool:
        return isinstance(other, TorusGrid) and (self.dim, self.points, self.oversample) == (
            other.dim,
            other.points,
            other.oversample,
        )

    def __hash__(self) -> int:
        return hash((self.dim, self.points, self.oversample))

    # -- geometry -----------------------------------------------------------

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.points,) * self.dim

    @property
    def size(self) -> int:
        return self.points**self.dim

    @property
    def spacing(self) -> float:
        return TWO_PI / self.points

    @property
    def weight(self) -> float:
        """Quadrature weight of every point, (2pi/N)^d."""
        return self.spacing**self.dim

    @property
    def volume(self) -> float:
        return TWO_PI**self.dim

    @cached_property
    def coords(self) -> np.ndarray:
        """Coordinates of shape (d, N, ..., N)."""
        axis = np.arange(self.points) * self.spacing
        return np.stack(np.meshgrid(*([axis] * self.dim), indexing="ij"))

    @cached_property
    def point_list(self) -> np.ndarray:
        """Coordinates of shape (N^d, d), C order."""
        return self.coords.reshape(self.dim, -1).T.copy()

    @cached_property
    def fine(self) -> "TorusGrid":
        """The oversampled grid used for nonlinear products."""
        if self.oversample == 1:
            return self
        return TorusGrid(self.dim, self.points * self.oversample, oversample=1)

    # -- spectral machinery ---------------------------------------------------

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Integer wavevectors of shape (d, N, ..., N)."""
        k = sfft.fftfreq(self.points, 1.0 / self.points)
        return np.stack(np.meshgrid(*([k] * self.dim), indexing="ij"))

    @cached_property
    def derivative_wavenumbers(self) -> np.ndarray:
        """Wavevectors with the Nyquist component zeroed (first derivatives)."""
        k = self.wavenumbers.copy()
        k[np.abs(k) == self.points // 2] = 0.0
        return k

    @cached_property
    def k_squared(self) -> np.ndarray:
        return np.sum(self.wavenumbers**2, axis=0)

    @property
    def _axes(self) -> Tuple[int, ...]:
        return tuple(range(-self.dim, 0))

    def transform(self, f: np.ndarray) -> np.ndarray:
        return sfft.fftn(f, axes=self._axes)

    def inverse(self, f_hat: np.ndarray) -> np.ndarray:
        return sfft.ifftn(f_hat, axes=self._axes).real

    def _check(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.shape[-self.dim :] != self.shape:
            raise InvalidInputError(f"field shape {f.shape} does not end with grid shape {self.shape}")
        return f

    # -- operators ------------------------------------------------------------

    def integrate(self, f: np.ndarray) -> np.ndarray:
        """Sum of weights times field over the grid axes."""
        f = self._check(f)
        return self.weight * np.sum(f, axis=self._axes)

    def inner(self, f: np.ndarray, g: np.ndarray) -> float:
        """L2 pairing of two fields of equal shape."""
        return float(np.sum(self.integrate(np.asarray(f) * np.asarray(g))))

    def gradient(self, f: np.ndarray) -> np.ndarray:
        """Gradient of a field; a new leading axis of length d indexes the derivative."""
        f = self._check(f)
        f_hat = self.transform(f)
        k = self.derivative_wavenumbers
        return np.stack([self.inverse(1j * k[b] * f_hat) for b in range(self.dim)], axis=f.ndim - self.dim)

    def divergence(self, v: np.ndarray) -> np.ndarray:
        """Divergence of a vector field of shape (d, ...)."""
        v = self._check(v)
        k = self.derivative_wavenumbers
        total = sum(1j * k[a] * self.transform(v[a]) for a in range(self.dim))
        return self.inverse(total)

    def vector_gradient(self, v: np.ndarray) -> np.ndarray:
        """G[a, b] = d v_a / d x_b for v of shape (d, ...)."""
        return self.gradient(v)

    def sym_gradient(self, v: np.ndarray) -> np.ndarray:
        G = self.vector_gradient(v)
        return 0.5 * (G + np.swapaxes(G, 0, 1))

    def laplacian(self, f: np.ndarray) -> np.ndarray:
        f = self._check(f)
        return self.inverse(-self.k_squared * self.transform(f))

    # -- resampling -------------------------------------------------------------

    def _mode_index(self, points: int) -> np.ndarray:
        """FFT positions of the resolved wavenumbers |k| < N/2 on a grid with `points` per axis."""
        half = self.points // 2
        k = np.concatenate([np.arange(0, half), np.arange(-half + 1, 0)])
        return np.mod(k, points)

    def resample(self, f: np.ndarray, points: int) -> np.ndarray:
        """Spectral interpolation (points > N) or truncation (points < N) of a field.

        The Nyquist mode is dropped in both directions.
        """
        f = self._check(f)
        if points == self.points:
            return f.copy()
        f_hat = self.transform(f)
        lead = f.shape[: f.ndim - self.dim]
        if points > self.points:
            src = self._mode_index(self.points)
            dst = self._mode_index(points)
            out = np.zeros(lead + (points,) * self.dim, dtype=complex)
            out[(Ellipsis,) + np.ix_(*([dst] * self.dim))] = f_hat[(Ellipsis,) + np.ix_(*([src] * self.dim))]
        else:
            coarse = TorusGrid(self.dim, points, 1)
            src = coarse._mode_index(self.points)
            dst = coarse._mode_index(points)
            out = np.zeros(lead + (points,) * self.dim, dtype=complex)
            out[(Ellipsis,) + np.ix_(*([dst] * self.dim))] = f_hat[(Ellipsis,) + np.ix_(*([src] * self.dim))]
        scale = (points / self.points) ** self.dim
        return sfft.ifftn(out * scale, axes=self._axes).real

    def to_fine(self, f: np.ndarray) -> np.ndarray:
        return self.resample(f, self.fine.points)

    def from_fine(self, f_fine: np.ndarray) -> np.ndarray:
        return self.fine.resample(f_fine, self.points)

    def dealiased_product(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        """Pointwise product evaluated on the fine grid and truncated back."""
        return self.from_fine(self.to_fine(f) * self.to_fine(g))


def spectral_derivatives(grid: TorusGrid, field: np.ndarray) -> Dict[str, np.ndarray]:
    """Spectral derivatives of a scalar field (N,..,N) or vector field (d, N,..,N).

    Returns:
        Dict with "gradient" and "laplacian"; vector fields also get
        "divergence" and "sym_gradient"
    """
    field = np.asarray(field, dtype=float)
    out = {"gradient": grid.gradient(field), "laplacian": grid.laplacian(field)}
    if field.ndim == grid.dim + 1:
        if field.shape[0] != grid.dim:
            raise InvalidInputError(f"vector field needs {grid.dim} components, got {field.shape[0]}")
        out["divergence"] = grid.divergence(field)
        out["sym_gradient"] = grid.sym_gradient(field)
    return out


def snapshot_rows(grid: TorusGrid, fields: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
    """Columns (coords..., components...) for a field snapshot table, one row per grid point."""
    columns: Dict[str, np.ndarray] = {}
    for a in range(grid.dim):
        columns[f"x{a + 1}"] = grid.point_list[:, a]
    for name, values in fields.items():
        values = np.asarray(values, dtype=float)
        if values.ndim == grid.dim:
            columns[name] = values.reshape(-1)
        else:
            for a in range(values.shape[0]):
                columns[f"{name}{a + 1}"] = values[a].reshape(-1)
    return columns
