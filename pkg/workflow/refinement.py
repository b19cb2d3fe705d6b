"""
Refinement studies: rerun a configuration along a ladder of one parameter and
measure successive differences of the final fields.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from core.errors import InvalidInputError, LabError, StepRejectedError
from core.schema import RunStatus
from diagnostics.energy import energy_report
from diagnostics.nikolskii import nikolskii_seminorm
from solver.state import SimConfig
from spectral.grid import TorusGrid
from workflow.simulation import Trajectory, run

logger = logging.getLogger(__name__)

# ladder parameter -> (SimConfig field, refinement direction: -1 decreasing, +1 increasing)
PARAMETERS = {
    "dt": ("dt", -1),
    "epsilon": ("epsilon", -1),
    "points": ("points", +1),
    "velocity_modes": ("n_velocity", +1),
    "temperature_modes": ("n_temperature", +1),
}
ALIASES = {"eps": "epsilon", "N": "points", "n": "velocity_modes", "k": "temperature_modes"}


def canonical_parameter(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in PARAMETERS:
        raise InvalidInputError(f"unknown ladder parameter {name!r}; choose from {sorted(PARAMETERS)}")
    return name


def parse_ladder(spec: str):
    """'param=v1,v2,...' -> (parameter, values)."""
    if "=" not in spec:
        raise InvalidInputError(f"ladder must look like 'param=v1,v2,...', got {spec!r}")
    name, raw = spec.split("=", 1)
    parameter = canonical_parameter(name.strip())
    try:
        values = [float(v) for v in raw.split(",") if v.strip()]
    except ValueError as e:
        raise InvalidInputError(f"ladder values must be numbers: {raw!r}") from e
    if PARAMETERS[parameter][1] > 0:
        values = [int(v) for v in values]
    return parameter, values


@dataclass
class RefinementLevel:
    level: int
    parameter: str
    value: float
    status: RunStatus
    trajectory: Optional[Trajectory] = None
    diff_rho: float = float("nan")
    diff_u: float = float("nan")
    diff_theta: float = float("nan")
    order_rho: float = float("nan")
    order_u: float = float("nan")
    order_theta: float = float("nan")
    dashboard: float = float("nan")
    nikolskii: float = float("nan")

    def to_row(self) -> Dict[str, Any]:
        return {
            "level": self.level,
            "parameter": self.parameter,
            "value": self.value,
            "status": self.status.value,
            "diff_rho": self.diff_rho,
            "diff_u": self.diff_u,
            "diff_theta": self.diff_theta,
            "order_rho": self.order_rho,
            "order_u": self.order_u,
            "order_theta": self.order_theta,
            "dashboard": self.dashboard,
            "nikolskii": self.nikolskii,
        }


@dataclass
class RefinementReport:
    parameter: str
    levels: List[RefinementLevel] = field(default_factory=list)

    def to_rows(self) -> List[Dict[str, Any]]:
        return [level.to_row() for level in self.levels]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(level, name) for level in self.levels], dtype=float)


def _final_fields(trajectory: Trajectory, reference: TorusGrid):
    """Final rho, u, theta evaluated at the reference grid points."""
    ctx = trajectory.context
    state = trajectory.final_state
    rho = ctx.grid.resample(state.rho, reference.points).reshape(-1)
    points = reference.point_list
    u = ctx.basis.velocity_at(state.alpha, points)
    theta = ctx.basis.temperature_at(state.nu, points)
    return rho, u, theta


def _l2(reference: TorusGrid, values: np.ndarray) -> float:
    return float(np.sqrt(reference.weight * np.sum(values**2)))


def _order(d_prev: float, d_curr: float, h_prev: float, h_curr: float) -> float:
    if not (d_prev > 0 and d_curr > 0) or h_prev == h_curr:
        return float("nan")
    return math.log(d_prev / d_curr) / math.log(h_prev / h_curr)


def refine_study(
    base: SimConfig,
    parameter: str,
    values: Sequence[float],
    nikolskii_deltas: Optional[Sequence[float]] = None,
) -> RefinementReport:
    """Run `base` at every ladder value and compare consecutive final states.

    Differences are L2 norms on the finest grid of the study (rho resampled
    spectrally, u and theta evaluated from their modes). The observed order at
    level l is log(d_{l-1}/d_l) / log(h_{l-1}/h_l), with h the parameter for
    dt and epsilon and its reciprocal for point and mode counts. A level whose
    run fails keeps its status and NaN entries.

    Raises:
        InvalidInputError: Unknown parameter, fewer than two values, or a
            ladder not ordered toward refinement
    """
    parameter = canonical_parameter(parameter)
    field_name, direction = PARAMETERS[parameter]
    values = list(values)
    if len(values) < 2:
        raise InvalidInputError("a ladder needs at least two values")
    steps = np.diff(np.asarray(values, dtype=float)) * direction
    if np.any(steps <= 0):
        raise InvalidInputError(f"{parameter} ladder {values} is not ordered toward refinement")

    report = RefinementReport(parameter)
    finest_points = int(max(values)) if parameter == "points" else base.grid.points
    reference = TorusGrid(base.grid.dim, finest_points, 1)
    fields: List[Optional[tuple]] = []

    for level, value in enumerate(values):
        entry = RefinementLevel(level, parameter, float(value), RunStatus.PENDING)
        try:
            config = base.with_updates(**{field_name: value, "name": f"{base.name}-{parameter}{level}"})
            trajectory = run(config)
            entry.trajectory = trajectory
            entry.status = trajectory.status
            entry.dashboard = energy_report(trajectory).dashboard
            try:
                entry.nikolskii = nikolskii_seminorm(trajectory, nikolskii_deltas)
            except InvalidInputError as e:
                logger.warning(f"[Refinement] Nikolskii seminorm unavailable at level {level}: {e}")
            fields.append(_final_fields(trajectory, reference))
        except LabError as e:
            entry.status = RunStatus.REJECTED if isinstance(e, StepRejectedError) else RunStatus.ABORTED
            logger.warning(f"[Refinement] Level {level} ({parameter}={value}) failed: {e}")
            fields.append(None)
        report.levels.append(entry)

    def h(value: float) -> float:
        return value if direction < 0 else 1.0 / value

    for l in range(1, len(values)):
        prev, curr = fields[l - 1], fields[l]
        if prev is None or curr is None:
            continue
        entry = report.levels[l]
        entry.diff_rho = _l2(reference, curr[0] - prev[0])
        entry.diff_u = _l2(reference, curr[1] - prev[1])
        entry.diff_theta = _l2(reference, curr[2] - prev[2])
        if l >= 2 and fields[l - 2] is not None:
            before = report.levels[l - 1]
            hp, hc = h(values[l - 1]), h(values[l])
            entry.order_rho = _order(before.diff_rho, entry.diff_rho, hp, hc)
            entry.order_u = _order(before.diff_u, entry.diff_u, hp, hc)
            entry.order_theta = _order(before.diff_theta, entry.diff_theta, hp, hc)

    logger.info(
        f"[Refinement] {parameter} ladder {values}: "
        + ", ".join(f"{lv.status.value}" for lv in report.levels)
    )
    return report
