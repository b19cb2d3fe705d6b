"""
Tool settings for the laboratory: console logging and the audit trail.

Simulation parameters live in the JSON run config (see cli.loader); this
module only covers how the tool itself behaves.
"""

import logging
from typing import Dict, Any, Optional
from pathlib import Path

import yaml

logger = logging.getLogger(__name__)

DEFAULT_SETTINGS_PATH = "muslab.yaml"


class Config:
    """Manages tool settings loaded from an optional YAML file."""

    def __init__(self, config_path: Optional[str] = None):
        """Initialize settings.

        Args:
            config_path: Path to YAML settings file (defaults to ./muslab.yaml)
        """
        self.config_path = Path(config_path or DEFAULT_SETTINGS_PATH)
        self.config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """Load settings from YAML file."""
        if self.config_path.exists():
            with open(self.config_path, "r") as f:
                data = yaml.safe_load(f) or {}
            logger.debug(f"[Config] Loaded settings from {self.config_path}")
            return data
        return {}

    def get(self, key_path: str, default: Any = None) -> Any:
        """Get a setting by dot-separated key path.

        Args:
            key_path: Dot-separated path (e.g., "audit.log_level")
            default: Default value if key not found

        Returns:
            Setting value
        """
        keys = key_path.split(".")
        value = self.config
        for key in keys:
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return default
        return value

    def get_logging_config(self) -> Dict[str, Any]:
        """Get console logging settings."""
        return {
            "level": self.get("logging.level", "INFO"),
            "format": self.get(
                "logging.format", "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
            ),
        }

    def get_audit_config(self) -> Dict[str, Any]:
        """Get audit trail settings."""
        return {
            "enabled": self.get("audit.enabled", True),
            "log_level": self.get("audit.log_level", "INFO"),
            "format": self.get(
                "audit.format", "%(asctime)s | %(name)s | %(levelname)s | %(message)s"
            ),
            "date_format": self.get("audit.date_format", "%Y-%m-%d %H:%M:%S"),
            "max_size_mb": self.get("audit.retention.max_size_mb", 50),
            "backup_count": self.get("audit.retention.backup_count", 5),
            "log_events": self.get("audit.log_events", {}),
        }
