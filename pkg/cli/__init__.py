"""
Command-line surface: config loading, manifests and subcommand dispatch.
"""

from .loader import build_config, load_config, load_document, parse_document
from .manifest import RunManifest, TOOL_VERSION
from .main import execute

__all__ = [
    "build_config",
    "load_config",
    "load_document",
    "parse_document",
    "RunManifest",
    "TOOL_VERSION",
    "execute",
]
