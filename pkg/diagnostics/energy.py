"""
Kinetic-energy balance and the uniform a-priori bounds of a trajectory.
"""

import logging
from dataclasses import asdict, dataclass
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from core.errors import InvalidInputError
from core.nfunction import frobenius
from diagnostics.records import as_matrices
from solver.assembly import sample_fields

if TYPE_CHECKING:
    from workflow.simulation import Trajectory

logger = logging.getLogger(__name__)


@dataclass
class EnergyReport:
    window_start: float
    window_end: float
    energy_residual: float
    dashboard: float
    du_p_integral: float
    grad_u_p_integral: float
    sup_u_l2: float
    dissipation_integral: float
    stress_l1_integral: float
    u_r_integral: float
    rho_u_r_integral: float
    exponent_p: float
    exponent_r: float

    def to_rows(self) -> List[Dict[str, Any]]:
        return [{"quantity": k, "value": float(v)} for k, v in asdict(self).items()]


def window_indices(times: np.ndarray, window: Optional[Tuple[float, float]]) -> np.ndarray:
    if window is None:
        return np.arange(times.size)
    s0, s1 = window
    if not s0 < s1:
        raise InvalidInputError(f"window must satisfy s0 < s1, got {window}")
    slack = 1e-9 * max(1.0, float(times[-1]))
    idx = np.flatnonzero((times >= s0 - slack) & (times <= s1 + slack))
    if idx.size < 2:
        raise InvalidInputError(f"window {window} holds fewer than two records")
    return idx


def energy_balance_residual(trajectory: "Trajectory", window: Optional[Tuple[float, float]] = None) -> float:
    """|KE(s) - KE(s0) + int S:Du - int rho f.u| over the window."""
    records = trajectory.records
    times = trajectory.times
    idx = window_indices(times, window)
    t = times[idx]
    ke = np.array([records[i].kinetic_energy for i in idx])
    dissipation = np.array([records[i].dissipation for i in idx])
    work = np.array([records[i].work for i in idx])
    return float(abs(ke[-1] - ke[0] + trapezoid(dissipation, t) - trapezoid(work, t)))


def energy_report(trajectory: "Trajectory", window: Optional[Tuple[float, float]] = None) -> EnergyReport:
    """Energy balance over a window plus the bounds that hold uniformly in n.

    Args:
        trajectory: Completed (or partial) run with at least two records
        window: (s0, s) for the balance residual; the whole run by default

    Returns:
        EnergyReport
    """
    records = trajectory.records
    if len(records) < 2:
        raise InvalidInputError("energy report needs at least two records")
    ctx = trajectory.context
    times = trajectory.times
    idx = window_indices(times, window)
    c_c = ctx.stress.coercivity_const
    p = float(ctx.stress.lower_power)
    r = 5.0 * p / 3.0

    ke = np.array([rec.kinetic_energy for rec in records])
    bound_density = np.array([0.5 * c_c * rec.modular + c_c * rec.conjugate_modular for rec in records])
    dashboard = float(np.max(ke + cumulative_trapezoid(bound_density, times, initial=0.0)))

    du_p, grad_p, stress_l1, u_r, rho_u_r = [], [], [], [], []
    for state in trajectory.snapshots:
        fs = sample_fields(ctx, state, fine=True)
        speed = np.sqrt(np.sum(fs.u**2, axis=0))
        du_p.append(fs.integrate(frobenius(as_matrices(fs.Du)) ** p))
        grad_p.append(fs.integrate(frobenius(as_matrices(fs.grad_u)) ** p))
        stress_l1.append(fs.integrate(frobenius(as_matrices(fs.S))))
        u_r.append(fs.integrate(speed**r))
        rho_u_r.append(fs.integrate((fs.rho * speed) ** r))
    snap_t = np.array([s.t for s in trajectory.snapshots])

    report = EnergyReport(
        window_start=float(times[idx[0]]),
        window_end=float(times[idx[-1]]),
        energy_residual=energy_balance_residual(trajectory, window),
        dashboard=dashboard,
        du_p_integral=float(trapezoid(du_p, snap_t)),
        grad_u_p_integral=float(trapezoid(grad_p, snap_t)),
        sup_u_l2=float(max(rec.u_l2 for rec in records)),
        dissipation_integral=float(trapezoid([rec.dissipation for rec in records], times)),
        stress_l1_integral=float(trapezoid(stress_l1, snap_t)),
        u_r_integral=float(trapezoid(u_r, snap_t)),
        rho_u_r_integral=float(trapezoid(rho_u_r, snap_t)),
        exponent_p=p,
        exponent_r=r,
    )
    logger.info(
        f"[EnergyReport] residual={report.energy_residual:.3e} dashboard={report.dashboard:.6g} "
        f"over [{report.window_start:g}, {report.window_end:g}]"
    )
    return report
