"""Fixed-length sliding windows over a frame stream."""

from __future__ import annotations

from typing import Sequence

import numpy as np


def window_count(n: int, length: int, stride: int) -> int:
    if n < length:
        return 0
    return (n - length) // stride + 1


def window_stream(
    frames: Sequence[np.ndarray] | np.ndarray,
    length: int = 30,
    stride: int = 1,
) -> list[np.ndarray]:
    """Windows of `length` frames starting at 0, stride, 2*stride, ..."""
    if length < 1 or stride < 1:
        raise ValueError(f"length and stride must be >= 1, got {length}, {stride}")
    arr = np.asarray(frames, dtype=np.float64)
    if arr.size == 0:
        return []
    count = window_count(arr.shape[0], length, stride)
    return [arr[i * stride : i * stride + length].copy() for i in range(count)]
