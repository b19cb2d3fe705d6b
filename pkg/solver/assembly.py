"""
Pointwise evaluation of the discrete fields on the coarse or oversampled grid.

Every array is flattened over the grid: scalars (P,), vectors (d, P),
matrices (d, d, P).
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from solver.state import SimContext, SimState


@dataclass
class FieldSample:
    """All fields of one state at the points of one grid level."""

    points: np.ndarray
    weight: float
    rho: np.ndarray
    grad_rho: np.ndarray
    u: np.ndarray
    grad_u: np.ndarray
    theta: np.ndarray
    theta_clip: np.ndarray
    grad_theta: np.ndarray
    S: np.ndarray

    @property
    def Du(self) -> np.ndarray:
        return 0.5 * (self.grad_u + np.swapaxes(self.grad_u, 0, 1))

    def integrate(self, values: np.ndarray) -> float:
        return float(self.weight * np.sum(values))


def density_fields(ctx: SimContext, rho: np.ndarray, fine: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """rho and grad rho, interpolated spectrally when fine."""
    grid = ctx.grid
    grad = grid.gradient(rho)
    if fine:
        rho, grad = grid.to_fine(rho), grid.to_fine(grad)
    return rho.reshape(-1), grad.reshape(ctx.dim, -1)


def velocity_fields(ctx: SimContext, alpha: np.ndarray, fine: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """u (d, P) and grad u (d, d, P) with [a, b] = d u_a / d x_b."""
    table, _ = ctx.basis.tables(fine)
    u = np.einsum("i,idp->dp", alpha, table.values)
    grad_u = np.einsum("i,iabp->abp", alpha, table.gradients)
    return u, grad_u


def temperature_fields(ctx: SimContext, nu: np.ndarray, fine: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    _, table = ctx.basis.tables(fine)
    return nu @ table.values, np.einsum("j,jap->ap", nu, table.gradients)


def clipped(ctx: SimContext, theta: np.ndarray) -> np.ndarray:
    """max(theta, theta_low), the temperature seen by S and kappa0."""
    return np.maximum(theta, ctx.data.theta_low)


def stress_field(ctx: SimContext, points: np.ndarray, rho: np.ndarray, theta: np.ndarray, Du: np.ndarray) -> np.ndarray:
    """S(x, rho, theta, Du) as (d, d, P)."""
    K = np.moveaxis(Du, -1, 0)
    S = ctx.stress(points, rho, theta, K)
    return np.moveaxis(np.asarray(S, dtype=float), 0, -1)


def sample_fields(ctx: SimContext, state: SimState, fine: bool = True) -> FieldSample:
    level = ctx.level(fine)
    rho, grad_rho = density_fields(ctx, state.rho, fine)
    u, grad_u = velocity_fields(ctx, state.alpha, fine)
    theta, grad_theta = temperature_fields(ctx, state.nu, fine)
    theta_clip = clipped(ctx, theta)
    Du = 0.5 * (grad_u + np.swapaxes(grad_u, 0, 1))
    S = stress_field(ctx, level.point_list, rho, theta_clip, Du)
    return FieldSample(
        points=level.point_list,
        weight=level.weight,
        rho=rho,
        grad_rho=grad_rho,
        u=u,
        grad_u=grad_u,
        theta=theta,
        theta_clip=theta_clip,
        grad_theta=grad_theta,
        S=S,
    )
