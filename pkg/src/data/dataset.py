"""
In-memory samples and datasets for both modalities, plus the stratified split.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

import numpy as np

from src.core.errors import ShapeError
from src.data.landmarks import FEATURES_PER_FRAME
from src.models.base import Modality


@dataclass
class LandmarkSequence:
    """T x 63 normalized landmark features with a class label."""
    frames: np.ndarray
    label: int

    def __post_init__(self) -> None:
        self.frames = np.ascontiguousarray(self.frames, dtype=np.float64)
        if self.frames.ndim != 2 or self.frames.shape[0] < 1:
            raise ShapeError(f"landmark sequence must be (T>=1, 63), got {self.frames.shape}")
        if self.frames.shape[1] != FEATURES_PER_FRAME:
            raise ShapeError(
                f"landmark sequence has {self.frames.shape[1]} features", axis="features"
            )
        if self.label < 0:
            raise ValueError(f"label must be >= 0, got {self.label}")

    @property
    def array(self) -> np.ndarray:
        return self.frames

    @property
    def length(self) -> int:
        return self.frames.shape[0]


@dataclass
class FrameVolume:
    """T x H x W x C voxel clip with intensities in [0, 1]."""
    voxels: np.ndarray
    label: int

    def __post_init__(self) -> None:
        self.voxels = np.ascontiguousarray(self.voxels, dtype=np.float64)
        if self.voxels.ndim != 4 or any(d < 1 for d in self.voxels.shape):
            raise ShapeError(f"frame volume must be (T, H, W, C) positive, got {self.voxels.shape}")
        if self.voxels.size and (self.voxels.min() < 0.0 or self.voxels.max() > 1.0):
            raise ValueError("frame volume intensities must lie in [0, 1]")
        if self.label < 0:
            raise ValueError(f"label must be >= 0, got {self.label}")

    @property
    def array(self) -> np.ndarray:
        return self.voxels

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return self.voxels.shape  # type: ignore[return-value]


Sample = Union[LandmarkSequence, FrameVolume]


@dataclass
class GestureDataset:
    """Ordered samples of one modality."""
    modality: Modality
    samples: list[Sample] = field(default_factory=list)
    num_classes: int = 0

    def __post_init__(self) -> None:
        expected = LandmarkSequence if self.modality is Modality.LANDMARKS else FrameVolume
        for i, s in enumerate(self.samples):
            if not isinstance(s, expected):
                raise TypeError(f"sample {i} is {type(s).__name__}, expected {expected.__name__}")
        if self.samples:
            self.num_classes = max(self.num_classes, max(s.label for s in self.samples) + 1)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[Sample]:
        return iter(self.samples)

    def __getitem__(self, idx: int) -> Sample:
        return self.samples[idx]

    @property
    def labels(self) -> np.ndarray:
        return np.array([s.label for s in self.samples], dtype=np.int64)

    def class_counts(self) -> dict[int, int]:
        return dict(sorted(Counter(int(s.label) for s in self.samples).items()))

    def subset(self, indices: Sequence[int]) -> GestureDataset:
        return GestureDataset(
            self.modality, [self.samples[i] for i in indices], self.num_classes
        )


def split_dataset(
    dataset: GestureDataset,
    test_fraction: float = 0.2,
    seed: int = 0,
) -> tuple[GestureDataset, GestureDataset]:
    """
    Stratified train/test split, deterministic per seed.

    Each class contributes round(n * test_fraction) samples to the test side,
    clamped to [1, n - 1]. Both sides keep the original sample order.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")

    rng = np.random.default_rng(seed)
    by_class: dict[int, list[int]] = {}
    for i, s in enumerate(dataset.samples):
        by_class.setdefault(int(s.label), []).append(i)

    test_idx: list[int] = []
    for label in sorted(by_class):
        members = by_class[label]
        if len(members) < 2:
            raise ValueError(f"class {label} has {len(members)} sample; need at least 2 to split")
        n_test = min(max(int(round(len(members) * test_fraction)), 1), len(members) - 1)
        chosen = rng.permutation(len(members))[:n_test]
        test_idx.extend(members[j] for j in chosen)

    test_set = set(test_idx)
    train_idx = [i for i in range(len(dataset)) if i not in test_set]
    return dataset.subset(train_idx), dataset.subset(sorted(test_set))
