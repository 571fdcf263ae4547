"""
Orthographic rendering of landmark sequences into frame volumes.

Each landmark's (x, y) is mapped onto the pixel grid through a fixed view box
and deposits a Gaussian blob; blobs are summed and clamped to [0, 1]. z is
dropped. Landmarks that project outside the grid deposit nothing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.core.errors import ShapeError
from src.data.dataset import FrameVolume, LandmarkSequence
from src.data.landmarks import NUM_LANDMARKS

DEFAULT_BLOB_SIGMA_PX = 1.5


@dataclass(frozen=True)
class ViewBox:
    """World rectangle mapped onto the pixel grid (y up, rows down)."""
    x_min: float = -1.5
    x_max: float = 1.5
    y_min: float = -0.5
    y_max: float = 2.5

    def to_pixels(self, xy: np.ndarray, height: int, width: int) -> tuple[np.ndarray, np.ndarray]:
        cols = (xy[:, 0] - self.x_min) / (self.x_max - self.x_min) * (width - 1)
        rows = (self.y_max - xy[:, 1]) / (self.y_max - self.y_min) * (height - 1)
        return rows, cols


DEFAULT_VIEW = ViewBox()


def render_points(
    xy: np.ndarray,
    height: int,
    width: int,
    blob_sigma_px: float = DEFAULT_BLOB_SIGMA_PX,
    view: ViewBox = DEFAULT_VIEW,
) -> np.ndarray:
    """One (height, width) frame from an (N, 2) array of world points."""
    if blob_sigma_px <= 0:
        raise ValueError(f"blob_sigma_px must be > 0, got {blob_sigma_px}")
    xy = np.asarray(xy, dtype=np.float64).reshape(-1, 2)
    rows, cols = view.to_pixels(xy, height, width)
    inside = (rows >= 0) & (rows <= height - 1) & (cols >= 0) & (cols <= width - 1)
    rows, cols = rows[inside], cols[inside]
    if rows.size == 0:
        return np.zeros((height, width))

    r = np.arange(height, dtype=np.float64)
    c = np.arange(width, dtype=np.float64)
    two_s2 = 2.0 * blob_sigma_px**2
    gr = np.exp(-((r[None, :] - rows[:, None]) ** 2) / two_s2)  # (N, H)
    gc = np.exp(-((c[None, :] - cols[:, None]) ** 2) / two_s2)  # (N, W)
    frame = np.einsum("nh,nw->hw", gr, gc)
    return np.clip(frame, 0.0, 1.0)


def render_volume(
    seq: LandmarkSequence,
    dims: tuple[int, int, int, int],
    blob_sigma_px: float = DEFAULT_BLOB_SIGMA_PX,
    view: ViewBox = DEFAULT_VIEW,
) -> FrameVolume:
    """
    Render every frame of seq into a (T, H, W, C) volume.

    The sequence length must equal T. Intensity is replicated across C.
    """
    t, h, w, ch = dims
    if min(dims) < 1:
        raise ShapeError(f"volume dims must be positive, got {dims}")
    if seq.length != t:
        raise ShapeError(f"sequence has {seq.length} frames, volume expects {t}", axis="time")

    points = seq.frames.reshape(t, NUM_LANDMARKS, 3)
    volume = np.empty((t, h, w, ch))
    for i in range(t):
        frame = render_points(points[i, :, :2], h, w, blob_sigma_px, view)
        volume[i] = frame[:, :, None]
    return FrameVolume(volume, seq.label)
