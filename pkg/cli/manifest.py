"""
Run manifest: everything needed to reproduce an output directory from its artifacts.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

from cli.schema import RunDocument
from core.schema import TableType
from solver.state import SimConfig
from utils.csv_export import write_table

logger = logging.getLogger(__name__)

TOOL_VERSION = "muslab 0.1.0"
MANIFEST_FILE = "manifest.csv"


def _flatten(prefix: str, value: Any, out: Dict[str, Any]) -> None:
    if isinstance(value, dict):
        for key, item in value.items():
            _flatten(f"{prefix}.{key}" if prefix else key, item, out)
    else:
        out[prefix] = value


def _text(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, (list, tuple)):
        return "[" + "; ".join(_text(v) for v in value) + "]"
    return str(value)


@dataclass
class RunManifest:
    """Config path, resolved settings, output directory, tool version and seed."""

    config_path: str
    document: RunDocument
    config: Optional[SimConfig]
    output_dir: Path
    command: str
    seed: int
    version: str = TOOL_VERSION

    def to_rows(self) -> List[Dict[str, str]]:
        entries: Dict[str, Any] = {
            "tool.version": self.version,
            "tool.command": self.command,
            "config.path": self.config_path,
            "output.resolved_directory": str(self.output_dir),
            "seed": self.seed,
        }
        _flatten("", self.document.model_dump(mode="json"), entries)
        if self.config is not None:
            entries["resolved.epsilon"] = float(self.config.epsilon)
            entries["resolved.n_steps"] = self.config.n_steps
            entries["resolved.stress"] = self.config.stress.name
            entries["resolved.nfunction"] = self.config.stress.nfunction.name
            entries["resolved.coercivity_const"] = float(self.config.stress.coercivity_const)
            if self.config.verdict is not None:
                entries["resolved.hypotheses_passed"] = self.config.verdict.passed
        return [{"key": key, "value": _text(value)} for key, value in entries.items()]

    def write(self) -> Path:
        """Create the output directory and write the manifest into it."""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        path = write_table(self.output_dir / MANIFEST_FILE, self.to_rows(), TableType.MANIFEST)
        logger.info(f"[Manifest] {self.command} manifest written to {path}")
        return path
