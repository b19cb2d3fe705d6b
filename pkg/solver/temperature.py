"""
Temperature substep on the coefficients nu with mass matrix (rho w_i, w_j).
"""

import numpy as np

from solver.assembly import clipped, density_fields, stress_field, temperature_fields, velocity_fields
from solver.base_stepper import BaseStepper
from solver.state import SimContext, SimState


class TemperatureStepper(BaseStepper):
    """Heun on nu; stage one sees the old velocity, stage two the updated one.

    F_j = -(rho u.grad theta, w_j) - (kappa0(rho, theta_clip) grad theta, grad w_j)
          + eps (grad rho . grad theta, w_j) + (S:Du, w_j)
    """

    def __init__(self, context: SimContext):
        super().__init__("TemperatureStepper", context)

    def mass_matrix(self, rho_fine: np.ndarray) -> np.ndarray:
        _, table = self.context.basis.tables(fine=True)
        M = self.context.grid.fine.weight * np.einsum("p,ip,jp->ij", rho_fine, table.values, table.values)
        return 0.5 * (M + M.T)

    def heating(self, alpha: np.ndarray, rho: np.ndarray, theta_clip: np.ndarray) -> np.ndarray:
        """Pointwise S:Du (zero when viscous heating is off)."""
        ctx = self.context
        if not ctx.config.viscous_heating:
            return np.zeros_like(rho)
        _, grad_u = velocity_fields(ctx, alpha, fine=True)
        Du = 0.5 * (grad_u + np.swapaxes(grad_u, 0, 1))
        S = stress_field(ctx, ctx.grid.fine.point_list, rho, theta_clip, Du)
        return np.einsum("abp,abp->p", S, Du)

    def rhs(self, nu: np.ndarray, alpha: np.ndarray, rho: np.ndarray, grad_rho: np.ndarray) -> np.ndarray:
        ctx = self.context
        _, table = ctx.basis.tables(fine=True)
        theta, grad_theta = temperature_fields(ctx, nu, fine=True)
        theta_clip = clipped(ctx, theta)
        u, _ = velocity_fields(ctx, alpha, fine=True)

        advection = rho * np.sum(u * grad_theta, axis=0)
        regularization = ctx.epsilon * np.sum(grad_rho * grad_theta, axis=0)
        scalar = regularization - advection + self.heating(alpha, rho, theta_clip)
        flux = ctx.heat.kappa0(rho, theta_clip) * grad_theta
        F = table.values @ scalar - np.einsum("ap,jap->j", flux, table.gradients)
        return ctx.grid.fine.weight * F

    def step(self, state: SimState, rho_new: np.ndarray, alpha_new: np.ndarray, dt: float) -> np.ndarray:
        ctx = self.context
        rho, grad_rho = density_fields(ctx, rho_new, fine=True)
        factor = self.factor(self.mass_matrix(rho), state.t)
        nu_new = self.heun(
            state.nu,
            dt,
            lambda nu: self.solve(factor, self.rhs(nu, state.alpha, rho, grad_rho)),
            lambda nu: self.solve(factor, self.rhs(nu, alpha_new, rho, grad_rho)),
        )
        self.log(f"t={state.t:.6g} mean mode={nu_new[0]:.12g}")
        return nu_new
