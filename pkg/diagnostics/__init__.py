"""
Runtime diagnostics: per-record quantities, balance reports and a-priori bounds.
"""

from .records import DiagnosticsRecord, DiagnosticsRecorder, instant_record
from .energy import EnergyReport, energy_report
from .thermal import ThermalReport, thermal_report
from .bounds import BoundsReport, bounds_report
from .nikolskii import nikolskii_profile, nikolskii_seminorm
from .export import records_rows, summary_lines

__all__ = [
    "DiagnosticsRecord",
    "DiagnosticsRecorder",
    "instant_record",
    "EnergyReport",
    "energy_report",
    "ThermalReport",
    "thermal_report",
    "BoundsReport",
    "bounds_report",
    "nikolskii_profile",
    "nikolskii_seminorm",
    "records_rows",
    "summary_lines",
]
