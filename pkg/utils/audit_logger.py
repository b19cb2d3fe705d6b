"""
Audit trail for simulation runs.

Structured JSON lines, one file per category under <output>/logs/:
- runs: run start and end with the resolved parameters
- records: every stored diagnostics record
- checks: pass/fail of admissibility, hypothesis and bound checks
- errors: rejected and aborted runs

The audit trail is for humans and log tooling; the CSV reports are the
reproducible artifacts.
"""

import json
import logging
import math
from datetime import datetime
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Dict, Optional, Union

from core.config import Config

CATEGORIES = ["runs", "records", "checks", "errors"]


def _jsonable(value: Any) -> Any:
    """Floats that JSON cannot carry (nan, inf) become strings."""
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


class RunAuditLogger:
    """
    Per-output-directory audit logger.

    Features:
    - Separate rotating log file per event category
    - JSON payloads for easy parsing
    - Event filtering from the tool settings (audit.log_events)
    """

    def __init__(self, output_dir: Union[str, Path], settings: Optional[Config] = None):
        """
        Initialize the audit logger.

        Args:
            output_dir: Run output directory; logs go to <output_dir>/logs
            settings: Tool settings (defaults to ./muslab.yaml if present)
        """
        self.settings = settings or Config()
        self.audit_config = self.settings.get_audit_config()
        self.enabled = self.audit_config["enabled"]
        self.logs_dir = Path(output_dir) / "logs"
        self.loggers: Dict[str, logging.Logger] = {}
        if self.enabled:
            self.logs_dir.mkdir(parents=True, exist_ok=True)
            self._setup_loggers()

    def _setup_loggers(self):
        """Set up one logger per category."""
        level = getattr(logging, str(self.audit_config["log_level"]).upper(), logging.INFO)
        formatter = logging.Formatter(self.audit_config["format"], datefmt=self.audit_config["date_format"])
        max_bytes = int(self.audit_config["max_size_mb"] * 1024 * 1024)
        backup_count = int(self.audit_config["backup_count"])

        for category in CATEGORIES:
            # keyed by directory so that two runs in one process do not share handlers
            logger = logging.getLogger(f"audit.{category}.{self.logs_dir.resolve()}")
            logger.setLevel(level)
            logger.propagate = False
            for handler in list(logger.handlers):
                handler.close()
            logger.handlers.clear()

            handler = RotatingFileHandler(
                self.logs_dir / f"{category}.log",
                maxBytes=max_bytes,
                backupCount=backup_count,
                encoding="utf-8",
            )
            handler.setFormatter(formatter)
            logger.addHandler(handler)
            self.loggers[category] = logger

    def _should_log(self, event_type: str) -> bool:
        """Check if this event type should be logged."""
        if not self.enabled:
            return False
        return self.audit_config["log_events"].get(event_type, True)

    def _emit(self, category: str, data: Dict[str, Any], level: int = logging.INFO):
        data = {"event": data.pop("event"), "timestamp": datetime.now().isoformat(), **data}
        self.loggers[category].log(level, json.dumps(_jsonable(data)))

    def log_run_start(self, config) -> None:
        """Log the resolved parameters of a run."""
        if not self._should_log("runs"):
            return
        self._emit(
            "runs",
            {
                "event": "run_start",
                "name": config.name,
                "dim": config.grid.dim,
                "points": config.grid.points,
                "oversample": config.grid.oversample,
                "n_velocity": config.n_velocity,
                "n_temperature": config.n_temperature,
                "T": config.T,
                "dt": config.dt,
                "epsilon": config.epsilon,
                "stress": config.stress.name,
                "nfunction": config.stress.nfunction.name,
                "seed": config.seed,
                "hypotheses_passed": None if config.verdict is None else config.verdict.passed,
            },
        )

    def log_record(self, record) -> None:
        """Log one diagnostics record."""
        if not self._should_log("records"):
            return
        self._emit("records", {"event": "record", **record.to_row()})

    def log_check(self, name: str, passed: bool, detail: str = "", metadata: Optional[Dict] = None) -> None:
        """Log the outcome of a named check."""
        if not self._should_log("checks"):
            return
        self._emit(
            "checks",
            {"event": "check", "name": name, "passed": bool(passed), "detail": detail, "metadata": metadata or {}},
        )

    def log_error(
        self,
        error_type: str,
        error_message: str,
        operation: str,
        t: Optional[float] = None,
        metadata: Optional[Dict] = None,
    ) -> None:
        """Log an error event."""
        if not self._should_log("errors"):
            return
        self._emit(
            "errors",
            {
                "event": "error",
                "error_type": error_type,
                "error_message": error_message,
                "operation": operation,
                "t": t,
                "metadata": metadata or {},
            },
            level=logging.ERROR,
        )

    def log_run_end(self, trajectory) -> None:
        """Log the final status and headline numbers of a run."""
        if not self._should_log("runs"):
            return
        last = trajectory.records[-1] if trajectory.records else None
        self._emit(
            "runs",
            {
                "event": "run_end",
                "name": trajectory.config.name,
                "status": trajectory.status.value,
                "records": len(trajectory.records),
                "t_final": None if last is None else last.t,
                "kinetic_energy": None if last is None else last.kinetic_energy,
                "mass": None if last is None else last.mass,
                "energy_residual": None if last is None else last.energy_residual,
            },
        )

    def close(self) -> None:
        """Close every file handler."""
        for logger in self.loggers.values():
            for handler in list(logger.handlers):
                handler.close()
                logger.removeHandler(handler)
        self.loggers.clear()
