"""
Error vocabulary for gesturebench.

Every failure the library raises on purpose derives from GestureBenchError,
so the CLI can turn it into a one-line diagnostic and exit code 1.
"""

from __future__ import annotations

from pathlib import Path


class GestureBenchError(Exception):
    """Root of all gesturebench errors."""


class ShapeError(GestureBenchError, ValueError):
    """Tensor dimensions disagree."""

    def __init__(self, message: str, axis: str | int | None = None):
        self.axis = axis
        if axis is not None:
            message = f"{message} (axis {axis})"
        super().__init__(message)


class KernelTooLargeError(ShapeError):
    """A kernel or pooling window does not fit inside its input."""


class ConfigurationError(GestureBenchError, ValueError):
    """A model or pipeline configuration cannot be realized."""


class UninitializedStatisticsError(GestureBenchError):
    """Batch norm was asked for inference before any training update."""


class DegenerateFrameError(GestureBenchError, ValueError):
    """A landmark frame has coincident reference landmarks."""


class ModalityMismatchError(GestureBenchError, ValueError):
    """Dataset modality does not match the model family."""


class DatasetFormatError(GestureBenchError):
    """A dataset file is malformed, truncated or inconsistent with its manifest."""

    def __init__(
        self,
        message: str,
        path: Path | str | None = None,
        line: int | None = None,
        offset: int | None = None,
    ):
        self.path = Path(path) if path is not None else None
        self.line = line
        self.offset = offset
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"offset {offset}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)


class CheckpointFormatError(GestureBenchError):
    """A checkpoint file is corrupt, truncated or of an unknown version."""
