"""
Tabular views of the diagnostics and the key=value verdict summary.
"""

import math
from typing import TYPE_CHECKING, Any, Dict, List, Optional

from core.schema import ReportSchema, TableType
from diagnostics.bounds import BoundsReport
from diagnostics.energy import EnergyReport
from diagnostics.thermal import ThermalReport

if TYPE_CHECKING:
    from workflow.simulation import Trajectory

MIN_COLUMNS = {"rho_min", "theta_min", "coercivity_margin"}
ABS_COLUMNS = {"energy_residual", "thermal_residual"}


def records_rows(trajectory: "Trajectory") -> List[Dict[str, Any]]:
    """One row per record plus a summary footer.

    The footer holds the final record, except extrema for the bound columns
    and the largest magnitude for the residuals.
    """
    columns = ReportSchema.get_column_names(TableType.DIAGNOSTICS)
    rows = []
    for i, rec in enumerate(trajectory.records):
        row = rec.to_row()
        row["row"] = f"record {i}"
        rows.append({c: row.get(c) for c in columns})
    if not rows:
        return rows
    footer = dict(rows[-1])
    footer["row"] = "summary"
    for c in columns[2:]:
        values = [r[c] for r in rows if r[c] is not None and not math.isnan(r[c])]
        if not values:
            continue
        if c in MIN_COLUMNS:
            footer[c] = min(values)
        elif c == "rho_max":
            footer[c] = max(values)
        elif c in ABS_COLUMNS:
            footer[c] = max(values, key=abs)
    rows.append(footer)
    return rows


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def summary_lines(
    trajectory: Optional["Trajectory"] = None,
    energy: Optional[EnergyReport] = None,
    thermal: Optional[ThermalReport] = None,
    bounds: Optional[BoundsReport] = None,
    nikolskii: Optional[float] = None,
) -> List[str]:
    """Machine-readable key=value lines for whatever reports are given."""
    lines = []
    if trajectory is not None:
        lines.append(f"run.status={trajectory.status.value}")
        lines.append(f"run.records={len(trajectory.records)}")
        if trajectory.verdict is not None:
            lines.append(f"hypotheses.passed={_fmt(trajectory.verdict.passed)}")
            for check in trajectory.verdict.checks:
                lines.append(f"hypotheses.{check.name}={_fmt(check.passed)}")
    if energy is not None:
        for row in energy.to_rows():
            lines.append(f"energy.{row['quantity']}={_fmt(row['value'])}")
    if thermal is not None:
        for row in thermal.to_rows():
            lines.append(f"thermal.{row['quantity']}={_fmt(row['value'])}")
    if bounds is not None:
        lines.append(f"bounds.passed={_fmt(bounds.passed)}")
        for name, ok in bounds.checks.items():
            lines.append(f"bounds.{name}={_fmt(bool(ok))}")
        lines.append(f"bounds.rho_overshoot={_fmt(float(bounds.worst_overshoot))}")
        lines.append(f"bounds.theta_min={_fmt(float(bounds.theta_min))}")
    if nikolskii is not None:
        lines.append(f"nikolskii.seminorm={_fmt(float(nikolskii))}")
    return lines
