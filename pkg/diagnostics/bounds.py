"""
Density bounds, temperature floor and mass drift per record.
"""

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, List

if TYPE_CHECKING:
    from workflow.simulation import Trajectory

logger = logging.getLogger(__name__)


@dataclass
class BoundsReport:
    rows: List[Dict[str, Any]]
    summary: Dict[str, Any]
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def worst_overshoot(self) -> float:
        return float(self.summary["rho_overshoot"])

    @property
    def theta_min(self) -> float:
        return float(self.summary["theta_min"])


def bounds_report(trajectory: "Trajectory") -> BoundsReport:
    """Compare each record with [rho_low, rho_high], theta_low and the initial mass.

    Tolerances: density overshoot up to bounds_tol times the gap rho_high - rho_low
    (times rho_high when the gap is zero), theta down to theta_low (1 - bounds_tol),
    mass drift up to mass_tol.
    """
    config = trajectory.config
    data = config.initial_data
    records = trajectory.records
    rows: List[Dict[str, Any]] = []
    mass0 = records[0].mass if records else 0.0
    for i, rec in enumerate(records):
        rows.append(
            {
                "row": f"record {i}",
                "t": rec.t,
                "rho_min": rec.rho_min,
                "rho_max": rec.rho_max,
                "rho_overshoot": max(0.0, rec.rho_max - data.rho_high, data.rho_low - rec.rho_min),
                "theta_min": rec.theta_min,
                "theta_undershoot": max(0.0, data.theta_low - rec.theta_min),
                "mass_drift": abs(rec.mass - mass0),
            }
        )

    summary = {
        "row": "summary",
        "t": records[-1].t if records else 0.0,
        "rho_min": min((r["rho_min"] for r in rows), default=float("nan")),
        "rho_max": max((r["rho_max"] for r in rows), default=float("nan")),
        "rho_overshoot": max((r["rho_overshoot"] for r in rows), default=0.0),
        "theta_min": min((r["theta_min"] for r in rows), default=float("nan")),
        "theta_undershoot": max((r["theta_undershoot"] for r in rows), default=0.0),
        "mass_drift": max((r["mass_drift"] for r in rows), default=0.0),
    }
    gap = data.rho_high - data.rho_low
    scale = gap if gap > 0 else data.rho_high
    checks = {
        "density_bounds": summary["rho_overshoot"] <= config.bounds_tol * scale,
        "temperature_floor": summary["theta_min"] >= data.theta_low * (1.0 - config.bounds_tol),
        "mass": summary["mass_drift"] <= config.mass_tol,
    }
    report = BoundsReport(rows=rows, summary=summary, checks=checks)
    for name, ok in checks.items():
        if not ok:
            logger.warning(f"[BoundsReport] {name} check failed: {summary}")
    return report
