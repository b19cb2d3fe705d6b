"""
Momentum substep: G(rho) dalpha/dt = R(alpha, nu, rho) with G_ij = (rho omega_i, omega_j).
"""

import numpy as np

from solver.assembly import clipped, density_fields, stress_field, temperature_fields, velocity_fields
from solver.base_stepper import BaseStepper
from solver.state import SimContext, SimState


class MomentumStepper(BaseStepper):
    """Heun on the velocity coefficients with the density frozen at its updated value.

    R_i = -(rho (u.grad)u, omega_i) - (S(x, rho, theta_clip, Du), D omega_i)
          + eps ((grad rho . grad) u, omega_i) + (rho f, omega_i)

    The eps term balances the eps Lap rho of the density equation so that
    d/dt 1/2 int rho|u|^2 = (rho f, u) - (S, Du) holds for the continuous flow.
    """

    def __init__(self, context: SimContext):
        super().__init__("MomentumStepper", context)

    def mass_matrix(self, rho_fine: np.ndarray) -> np.ndarray:
        table, _ = self.context.basis.tables(fine=True)
        G = self.context.grid.fine.weight * np.einsum("p,idp,jdp->ij", rho_fine, table.values, table.values)
        return 0.5 * (G + G.T)

    def rhs(
        self,
        alpha: np.ndarray,
        theta_clip: np.ndarray,
        rho: np.ndarray,
        grad_rho: np.ndarray,
        t: float,
    ) -> np.ndarray:
        ctx = self.context
        table, _ = ctx.basis.tables(fine=True)
        u, grad_u = velocity_fields(ctx, alpha, fine=True)
        Du = 0.5 * (grad_u + np.swapaxes(grad_u, 0, 1))
        S = stress_field(ctx, ctx.grid.fine.point_list, rho, theta_clip, Du)

        convection = np.einsum("abp,bp->ap", grad_u, u)
        regularization = np.einsum("abp,bp->ap", grad_u, grad_rho)
        body = rho * (ctx.forcing(t, fine=True) - convection) + ctx.epsilon * regularization
        # S symmetric, so S : grad omega_i = S : D omega_i
        R = np.einsum("dp,idp->i", body, table.values) - np.einsum("abp,iabp->i", S, table.gradients)
        return ctx.grid.fine.weight * R

    def step(self, state: SimState, rho_new: np.ndarray, dt: float) -> np.ndarray:
        """Advance alpha; theta enters S at its start-of-step value."""
        ctx = self.context
        rho, grad_rho = density_fields(ctx, rho_new, fine=True)
        theta, _ = temperature_fields(ctx, state.nu, fine=True)
        theta_clip = clipped(ctx, theta)
        factor = self.factor(self.mass_matrix(rho), state.t)

        def slope(t):
            return lambda a: self.solve(factor, self.rhs(a, theta_clip, rho, grad_rho, t))

        alpha_new = self.heun(state.alpha, dt, slope(state.t), slope(state.t + dt))
        self.log(f"t={state.t:.6g} |alpha|={np.linalg.norm(alpha_new):.6g}")
        return alpha_new
