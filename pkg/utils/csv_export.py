"""
Bit-stable CSV output: a '#' header comment, then 17-significant-digit rows.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import pandas as pd

from core.schema import ReportSchema

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def header_comment(table: str, columns: Iterable[str]) -> str:
    """'# <table>: col (description), ...' using the schema descriptions when known."""
    described = ReportSchema.get_columns(table)
    parts = [f"{c} ({described[c]})" if c in described else c for c in columns]
    return f"# {table}: " + ", ".join(parts)


def to_frame(rows: Union[pd.DataFrame, List[Dict[str, Any]]], columns: Optional[List[str]] = None) -> pd.DataFrame:
    frame = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(rows)
    if columns:
        frame = frame.reindex(columns=columns)
    return frame


def write_table(
    path: Union[str, Path],
    rows: Union[pd.DataFrame, List[Dict[str, Any]]],
    table: str,
    columns: Optional[List[str]] = None,
) -> Path:
    """Write one CSV table.

    Args:
        path: Destination file
        rows: DataFrame or list of row dicts
        table: Table name (see core.schema.TableType) for the header comment
        columns: Column order; defaults to the schema order, then the row order

    Returns:
        The written path
    """
    path = Path(path)
    columns = columns or ReportSchema.get_column_names(table) or None
    frame = to_frame(rows, columns)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(header_comment(table, frame.columns) + "\n")
        frame.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"[CSV] Wrote {len(frame)} rows to {path}")
    return path
