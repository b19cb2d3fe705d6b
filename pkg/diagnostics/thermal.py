"""
Thermal balance and the temperature estimates of a trajectory.
"""

import logging
from dataclasses import asdict, dataclass
from typing import TYPE_CHECKING, Any, Dict, List, Optional

import numpy as np
from scipy.integrate import trapezoid

from core.errors import InvalidInputError
from solver.assembly import sample_fields

if TYPE_CHECKING:
    from workflow.simulation import Trajectory

logger = logging.getLogger(__name__)


@dataclass
class ThermalReport:
    thermal_lambda: float
    balance_residual: float
    thermal_increment: float
    min_step_increment: float
    sup_thermal_mass: float
    sup_theta_integral: float
    gradient_power_integral: float
    gradient_power_w12_integral: float
    theta_s_integral: float
    flux_m_integral: float
    exponent_e: float
    exponent_s: float
    exponent_m: float

    def to_rows(self) -> List[Dict[str, Any]]:
        return [{"quantity": k, "value": float(v)} for k, v in asdict(self).items()]


def thermal_exponents(beta: float, lam: float):
    """(e, s, m): theta^e with e = (beta - lam + 1)/2, s just below 5/3 + beta, m just below (5+3beta)/(4+3beta)."""
    e = 0.5 * (beta - lam + 1.0)
    s = max(1.0, 5.0 / 3.0 + beta - 0.01)
    m = 1.0 + 0.99 * ((5.0 + 3.0 * beta) / (4.0 + 3.0 * beta) - 1.0)
    return e, s, m


def thermal_report(trajectory: "Trajectory", thermal_lambda: Optional[float] = None) -> ThermalReport:
    """Balance of int rho theta against int S:Du, and the temperature bounds.

    The conductive flux integrates to zero on the torus, so testing the
    temperature equation with h = 1 leaves d/dt int rho theta = int S:Du.
    """
    ctx = trajectory.context
    lam = ctx.config.thermal_lambda if thermal_lambda is None else thermal_lambda
    if not 0 < lam < 1:
        raise InvalidInputError(f"lambda must lie in (0, 1), got {lam}")
    records = trajectory.records
    if len(records) < 2:
        raise InvalidInputError("thermal report needs at least two records")
    times = trajectory.times
    beta = ctx.heat.beta
    e, s, m = thermal_exponents(beta, lam)

    mass = np.array([rec.thermal_mass for rec in records])
    heating = np.array([rec.heating for rec in records])
    increment = float(mass[-1] - mass[0])

    grad_e, w12_e, theta_s, flux_m = [], [], [], []
    for state in trajectory.snapshots:
        fs = sample_fields(ctx, state, fine=True)
        tc = fs.theta_clip
        g2 = np.sum(fs.grad_theta**2, axis=0)
        grad_power = fs.integrate(e * e * tc ** (2.0 * (e - 1.0)) * g2)
        grad_e.append(grad_power)
        w12_e.append(grad_power + fs.integrate(tc ** (2.0 * e)))
        theta_s.append(fs.integrate(np.abs(fs.theta) ** s))
        kappa0 = ctx.heat.kappa0(fs.rho, tc)
        flux_m.append(fs.integrate((kappa0 * np.sqrt(g2)) ** m))
    snap_t = np.array([st.t for st in trajectory.snapshots])

    report = ThermalReport(
        thermal_lambda=lam,
        balance_residual=float(abs(increment - trapezoid(heating, times))),
        thermal_increment=increment,
        min_step_increment=float(np.min(np.diff(mass))),
        sup_thermal_mass=float(mass.max()),
        sup_theta_integral=float(max(rec.theta_integral for rec in records)),
        gradient_power_integral=float(trapezoid(grad_e, snap_t)),
        gradient_power_w12_integral=float(trapezoid(w12_e, snap_t)),
        theta_s_integral=float(trapezoid(theta_s, snap_t)),
        flux_m_integral=float(trapezoid(flux_m, snap_t)),
        exponent_e=e,
        exponent_s=s,
        exponent_m=m,
    )
    logger.info(
        f"[ThermalReport] residual={report.balance_residual:.3e} increment={increment:.6g} lambda={lam:g}"
    )
    return report
