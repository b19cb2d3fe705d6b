"""
Schema definitions: model kinds and the column layout of every CSV table.
"""

from typing import Dict, List
from enum import Enum


class NFunctionKind(Enum):
    """Structural families of N-functions."""

    ISOTROPIC_POWER = "isotropic-power"
    VARIABLE_EXPONENT = "variable-exponent"
    ANISOTROPIC_SEPARABLE = "anisotropic-separable"
    CARREAU = "carreau"
    CUSTOM = "custom"


class StressKind(Enum):
    """Built-in stress tensor families."""

    POWER_LAW = "power-law"
    CARREAU = "carreau"
    VARIABLE_EXPONENT = "variable-exponent"
    ANISOTROPIC_SEPARABLE = "anisotropic-separable"
    CUSTOM = "custom"


class Delta2Verdict(Enum):
    """Empirical verdict of the doubling test."""

    PLAUSIBLE = "Δ2-plausible"
    VIOLATED = "Δ2-violated"


class RunStatus(Enum):
    """Lifecycle of a simulation run."""

    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    REJECTED = "rejected"
    ABORTED = "aborted"


class TableType:
    """Names of the CSV tables the laboratory writes."""

    DIAGNOSTICS = "diagnostics"
    ENERGY = "energy_report"
    THERMAL = "thermal_report"
    BOUNDS = "bounds_report"
    REFINEMENT = "refine_report"
    CONJUGATE = "conjugate_table"
    ADMISSIBILITY = "admissibility_report"
    AXIOMS = "axiom_report"
    HYPOTHESES = "hypothesis_report"
    MANIFEST = "manifest"
    SNAPSHOT = "snapshot"


class ReportSchema:
    """Column layout and descriptions for the CSV tables."""

    @staticmethod
    def get_columns(table: str) -> Dict[str, str]:
        """Get the ordered columns of a table with their descriptions."""
        columns = {
            TableType.DIAGNOSTICS: {
                "row": "record | summary",
                "t": "time",
                "kinetic_energy": "1/2 int rho |u|^2",
                "dissipation": "(S, Du)",
                "work": "(rho f, u)",
                "heating": "int S:Du fed to the temperature equation",
                "modular": "int M(x, Du)",
                "conjugate_modular": "int M*(x, S)",
                "mass": "int rho",
                "rho_min": "min rho",
                "rho_max": "max rho",
                "theta_min": "min theta",
                "thermal_mass": "int rho theta",
                "theta_integral": "int theta",
                "u_l2": "||u||_L2",
                "coercivity_margin": "min S:Du - c_c (M + M*)",
                "lux_norm_du": "Luxemburg norm of Du over the trailing window",
                "lux_norm_s": "Luxemburg norm of S over the trailing window (M*)",
                "energy_residual": "cumulative energy-balance residual",
                "thermal_residual": "cumulative thermal-balance residual",
            },
            TableType.ENERGY: {
                "quantity": "name",
                "value": "value",
            },
            TableType.THERMAL: {
                "quantity": "name",
                "value": "value",
            },
            TableType.BOUNDS: {
                "row": "record | summary",
                "t": "time",
                "rho_min": "min rho",
                "rho_max": "max rho",
                "rho_overshoot": "max(0, rho_max - rho_high, rho_low - rho_min)",
                "theta_min": "min theta",
                "theta_undershoot": "max(0, theta_low - theta_min)",
                "mass_drift": "|int rho(t) - int rho_0|",
            },
            TableType.REFINEMENT: {
                "level": "ladder index",
                "parameter": "swept parameter",
                "value": "parameter value",
                "status": "run status",
                "diff_rho": "||rho_l - rho_(l-1)||_L2",
                "diff_u": "||u_l - u_(l-1)||_L2",
                "diff_theta": "||theta_l - theta_(l-1)||_L2",
                "order_rho": "observed order from successive differences",
                "order_u": "observed order from successive differences",
                "order_theta": "observed order from successive differences",
                "dashboard": "a-priori dashboard value",
                "nikolskii": "time-shift seminorm",
            },
            TableType.ADMISSIBILITY: {
                "check": "sampled property",
                "passed": "verdict",
                "worst": "worst sampled value",
                "witness": "sample attaining the worst value",
            },
            TableType.AXIOMS: {
                "check": "sampled property",
                "passed": "verdict",
                "worst": "worst sampled value",
                "witness": "sample attaining the worst value",
            },
            TableType.HYPOTHESES: {
                "check": "existence hypothesis",
                "passed": "verdict",
                "informational": "reported but not required",
                "detail": "value and threshold",
            },
            TableType.MANIFEST: {
                "key": "dotted setting",
                "value": "resolved value",
            },
        }
        return columns.get(table, {})

    @staticmethod
    def get_column_names(table: str) -> List[str]:
        """Get the ordered column names of a table."""
        return list(ReportSchema.get_columns(table).keys())
