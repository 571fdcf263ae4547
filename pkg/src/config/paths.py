"""
Centralized filesystem paths for gesturebench.

Single source of truth for every ~/.gesturebench/* location. The home can be
moved with GESTUREBENCH_HOME.
"""

from __future__ import annotations

import os
from pathlib import Path


def home_dir() -> Path:
    return Path(os.environ.get("GESTUREBENCH_HOME", Path.home() / ".gesturebench"))


def config_file() -> Path:
    return home_dir() / "config.json"


def runs_dir() -> Path:
    """Default destination for checkpoints, histories and reports."""
    return home_dir() / "runs"
