"""
Shared helpers: audit trail, CSV output and the config expression grammar.
"""

from .audit_logger import RunAuditLogger
from .csv_export import write_table, header_comment
from .expressions import compile_expression, grid_field, time_field

__all__ = [
    "RunAuditLogger",
    "write_table",
    "header_comment",
    "compile_expression",
    "grid_field",
    "time_field",
]
