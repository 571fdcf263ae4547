"""
Hand landmark frames: 21 keypoints x (x, y, z) = 63 features.

Landmark indices follow the usual hand-tracking layout: 0 wrist, 1-4 thumb,
5-8 index, 9-12 middle, 13-16 ring, 17-20 pinky.
"""

from __future__ import annotations

import numpy as np

from src.core.errors import DegenerateFrameError, ShapeError

NUM_LANDMARKS = 21
FEATURES_PER_FRAME = NUM_LANDMARKS * 3
WRIST = 0
MIDDLE_MCP = 9

FINGER_CHAINS: dict[str, tuple[int, int, int, int]] = {
    "thumb": (1, 2, 3, 4),
    "index": (5, 6, 7, 8),
    "middle": (9, 10, 11, 12),
    "ring": (13, 14, 15, 16),
    "pinky": (17, 18, 19, 20),
}


def as_points(frame: np.ndarray) -> np.ndarray:
    """View a 63-vector as (21, 3) points, validating size and finiteness."""
    arr = np.asarray(frame, dtype=np.float64).reshape(-1)
    if arr.size != FEATURES_PER_FRAME:
        raise ShapeError(f"landmark frame needs {FEATURES_PER_FRAME} values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise DegenerateFrameError("landmark frame contains non-finite values")
    return arr.reshape(NUM_LANDMARKS, 3)


def normalize_landmarks(frame: np.ndarray) -> np.ndarray:
    """
    Translate the wrist to the origin and scale so |landmark 9 - landmark 0| = 1.

    The same factor scales z. Raises DegenerateFrameError when the two
    reference landmarks coincide.
    """
    points = as_points(frame)
    centered = points - points[WRIST]
    scale = float(np.linalg.norm(centered[MIDDLE_MCP]))
    if scale < 1e-12:
        raise DegenerateFrameError("wrist and middle-finger MCP coincide")
    return (centered / scale).reshape(FEATURES_PER_FRAME)


def is_normalized(frame: np.ndarray, tol: float = 1e-9) -> bool:
    points = as_points(frame)
    return bool(
        np.all(np.abs(points[WRIST]) <= tol)
        and abs(np.linalg.norm(points[MIDDLE_MCP]) - 1.0) <= tol
    )
