"""
Core module - shared building blocks.

This module contains:
- The error hierarchy
- Structured logging setup
- Atomic file writes
"""

from src.core.errors import (
    CheckpointFormatError,
    ConfigurationError,
    DatasetFormatError,
    DegenerateFrameError,
    GestureBenchError,
    ModalityMismatchError,
    ShapeError,
)
from src.core.fileio import atomic_write_bytes, atomic_write_text
from src.core.logging import StructuredLogger, configure_logging

__all__ = [
    "GestureBenchError",
    "ShapeError",
    "DegenerateFrameError",
    "DatasetFormatError",
    "CheckpointFormatError",
    "ConfigurationError",
    "ModalityMismatchError",
    "atomic_write_bytes",
    "atomic_write_text",
    "StructuredLogger",
    "configure_logging",
]
