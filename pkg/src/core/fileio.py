"""Atomic file writes: write to a sibling .tmp file, then rename over the target."""

from __future__ import annotations

import logging
from pathlib import Path

logger = logging.getLogger(__name__)


def atomic_write_bytes(path: Path | str, data: bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = path.with_suffix(path.suffix + ".tmp")
    try:
        tmp_path.write_bytes(data)
        tmp_path.replace(path)  # atomic
    except Exception as e:
        logger.error("Failed to write %s: %s", path, e)
        tmp_path.unlink(missing_ok=True)
        raise
    return path


def atomic_write_text(path: Path | str, text: str) -> Path:
    return atomic_write_bytes(path, text.encode("utf-8"))
