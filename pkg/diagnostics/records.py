"""
Per-record diagnostics of a run: energies, dissipation, modulars, bounds
and the cumulative balance residuals.
"""

import logging
from collections import deque
from dataclasses import asdict, dataclass
from typing import Any, Deque, Dict, List

import numpy as np

from core.nfunction import conjugate_field, conjugate_nfunction, contract
from core.orlicz import SampledField, luxemburg_norm
from solver.assembly import FieldSample, sample_fields
from solver.state import SimContext, SimState

logger = logging.getLogger(__name__)


@dataclass
class DiagnosticsRecord:
    t: float
    kinetic_energy: float
    dissipation: float
    work: float
    heating: float
    modular: float
    conjugate_modular: float
    mass: float
    rho_min: float
    rho_max: float
    theta_min: float
    thermal_mass: float
    theta_integral: float
    u_l2: float
    coercivity_margin: float
    lux_norm_du: float = float("nan")
    lux_norm_s: float = float("nan")
    energy_residual: float = 0.0
    thermal_residual: float = 0.0

    def to_row(self) -> Dict[str, Any]:
        return asdict(self)


def as_matrices(values: np.ndarray) -> np.ndarray:
    """(d, d, P) -> (P, d, d)."""
    return np.moveaxis(values, -1, 0)


def modular_terms(ctx: SimContext, fs: FieldSample):
    """Pointwise M(x, Du) and M*(x, S)."""
    nf = ctx.stress.nfunction
    M = np.asarray(nf(fs.points, as_matrices(fs.Du)), dtype=float)
    M_star = conjugate_field(nf, fs.points, as_matrices(fs.S), ctx.config.conjugate_params)
    return M, M_star


def instant_record(ctx: SimContext, state: SimState) -> DiagnosticsRecord:
    """Everything that depends on one state only; residuals and norms are filled by the recorder."""
    fs = sample_fields(ctx, state, fine=True)
    speed2 = np.sum(fs.u**2, axis=0)
    work_density = contract(as_matrices(fs.S), as_matrices(fs.Du))
    M, M_star = modular_terms(ctx, fs)
    forcing = ctx.forcing(state.t, fine=True)
    theta_coarse = ctx.basis.synthesize_temperature(state.nu)
    dissipation = fs.integrate(work_density)
    c_c = ctx.stress.coercivity_const
    return DiagnosticsRecord(
        t=float(state.t),
        kinetic_energy=0.5 * fs.integrate(fs.rho * speed2),
        dissipation=dissipation,
        work=fs.integrate(fs.rho * np.sum(forcing * fs.u, axis=0)),
        heating=dissipation if ctx.config.viscous_heating else 0.0,
        modular=fs.integrate(M),
        conjugate_modular=fs.integrate(M_star),
        mass=float(ctx.grid.integrate(state.rho)),
        rho_min=float(state.rho.min()),
        rho_max=float(state.rho.max()),
        theta_min=float(theta_coarse.min()),
        thermal_mass=fs.integrate(fs.rho * fs.theta),
        theta_integral=fs.integrate(fs.theta),
        u_l2=float(np.sqrt(fs.integrate(speed2))),
        coercivity_margin=float(np.min(work_density - c_c * (M + M_star))),
    )


class DiagnosticsRecorder:
    """Builds the record stream of a run.

    Residuals accumulate by the trapezoid rule between consecutive records:
        energy_residual  = KE(t) - KE(0) - int (work - dissipation)
        thermal_residual = int rho theta (t) - int rho theta (0) - int heating
    Luxemburg norms of Du (under M) and S (under M*) are evaluated every
    `luxemburg_stride` records over the trailing window of that many records.
    """

    def __init__(self, context: SimContext):
        self.context = context
        self.records: List[DiagnosticsRecord] = []
        self.stride = context.config.luxemburg_stride
        self._window: Deque[SimState] = deque(maxlen=self.stride)
        self._conjugate = conjugate_nfunction(context.stress.nfunction, context.config.conjugate_params)
        self._power_sum = 0.0
        self._heat_sum = 0.0

    def record(self, state: SimState) -> DiagnosticsRecord:
        rec = instant_record(self.context, state)
        if self.records:
            prev = self.records[-1]
            gap = rec.t - prev.t
            self._power_sum += 0.5 * gap * ((prev.work - prev.dissipation) + (rec.work - rec.dissipation))
            self._heat_sum += 0.5 * gap * (prev.heating + rec.heating)
            first = self.records[0]
            rec.energy_residual = rec.kinetic_energy - first.kinetic_energy - self._power_sum
            rec.thermal_residual = rec.thermal_mass - first.thermal_mass - self._heat_sum
        self._window.append(state.copy())
        if len(self.records) % self.stride == self.stride - 1:
            rec.lux_norm_du, rec.lux_norm_s = self.window_norms()
        self.records.append(rec)
        logger.debug(
            f"[DiagnosticsRecorder] t={rec.t:.6g} KE={rec.kinetic_energy:.6g} "
            f"dissipation={rec.dissipation:.6g} residual={rec.energy_residual:.3e}"
        )
        return rec

    def window_norms(self):
        """Luxemburg norms of Du and S over the trailing window, on the coarse grid."""
        ctx = self.context
        grid = ctx.grid
        samples = [sample_fields(ctx, s, fine=False) for s in self._window]
        times = [s.t for s in self._window]
        duration = ctx.config.cadence * ctx.config.dt
        points = grid.point_list

        def field_of(values):
            return SampledField.from_snapshots(
                values, points, grid.weight, times=times if len(times) > 1 else None, duration=duration
            )

        du = field_of([as_matrices(fs.Du) for fs in samples])
        s = field_of([as_matrices(fs.S) for fs in samples])
        return luxemburg_norm(ctx.stress.nfunction, du), luxemburg_norm(self._conjugate, s)
