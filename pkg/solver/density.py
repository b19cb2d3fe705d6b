"""
Density substep: drho/dt + div(rho u) = eps Lap rho by integrating-factor Heun.
"""

import numpy as np

from core.errors import StepRejectedError
from solver.assembly import velocity_fields
from solver.base_stepper import BaseStepper
from solver.state import SimContext, SimState


class DensityStepper(BaseStepper):
    """Advection explicit and pseudo-spectral, diffusion exact in Fourier space.

    With E = exp(-eps |k|^2 dt) and N(rho) = -div P_N(rho u):
        rho_1   = E (rho + dt N(rho))
        rho_new = E rho + dt/2 (E N(rho) + N(rho_1))
    The k = 0 mode of N vanishes, so the mean of rho is carried unchanged.
    """

    def __init__(self, context: SimContext):
        super().__init__("DensityStepper", context)

    def courant(self, u_fine: np.ndarray, dt: float) -> float:
        speed = float(np.max(np.sqrt(np.sum(u_fine**2, axis=0))))
        return speed * dt / self.context.grid.spacing

    def transport(self, rho: np.ndarray, u_fine: np.ndarray) -> np.ndarray:
        """-div(rho u) with the product formed on the fine grid."""
        grid = self.context.grid
        flux_fine = grid.to_fine(rho) * u_fine.reshape((grid.dim,) + grid.fine.shape)
        return -grid.divergence(grid.from_fine(flux_fine))

    def step(self, state: SimState, dt: float) -> np.ndarray:
        """Advance rho over one step with the velocity of `state`.

        Raises:
            StepRejectedError: If max|u| dt / dx exceeds the configured limit
        """
        ctx = self.context
        grid = ctx.grid
        limit = ctx.config.cfl_limit
        u_fine, _ = velocity_fields(ctx, state.alpha, fine=True)
        courant = self.courant(u_fine, dt)
        if courant > limit:
            self.logger.warning(f"[{self.name}] Courant number {courant:.4g} above {limit:.4g} at t={state.t:.6g}")
            raise StepRejectedError(state.t, dt, courant, limit)
        if courant > 0.8 * limit:
            self.logger.warning(f"[{self.name}] Courant number {courant:.4g} close to the limit {limit:.4g}")

        decay = np.exp(-ctx.epsilon * grid.k_squared * dt)
        rho_hat = grid.transform(state.rho)
        n0_hat = grid.transform(self.transport(state.rho, u_fine))
        rho_1 = grid.inverse(decay * (rho_hat + dt * n0_hat))
        n1_hat = grid.transform(self.transport(rho_1, u_fine))
        rho_new = grid.inverse(decay * rho_hat + 0.5 * dt * (decay * n0_hat + n1_hat))
        self.log(f"t={state.t:.6g} courant={courant:.4g} min rho={rho_new.min():.6g}")
        return rho_new
