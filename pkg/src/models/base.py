"""
Abstract base class for gesture classifiers.

Both families (landmark LSTM, frame-volume 3D CNN) implement this interface so
the trainer, evaluator, stream pipeline and benchmark harness stay
family-agnostic.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from enum import Enum
from typing import Any

import numpy as np

from src.tensor import Mode, Tensor, softmax, softmax_crossentropy


class ModelFamily(str, Enum):
    """Model family tags, as written into checkpoints."""
    LSTM = "lstm"
    CNN3D = "cnn3d"


class Modality(str, Enum):
    """Input modality a family consumes."""
    LANDMARKS = "landmarks"
    VOLUMES = "volumes"


FAMILY_MODALITY: dict[ModelFamily, Modality] = {
    ModelFamily.LSTM: Modality.LANDMARKS,
    ModelFamily.CNN3D: Modality.VOLUMES,
}


def uniform_init(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    """uniform(-1/sqrt(fan_in), +1/sqrt(fan_in))."""
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


class GestureModel(ABC):
    """Abstract base for all gesture classifiers."""

    family: ModelFamily

    def __init__(self) -> None:
        self.params: dict[str, Tensor] = {}

    @property
    def modality(self) -> Modality:
        return FAMILY_MODALITY[self.family]

    @property
    @abstractmethod
    def num_classes(self) -> int: ...

    @abstractmethod
    def config_dict(self) -> dict[str, Any]:
        """Architecture config as plain JSON-compatible data."""
        ...

    @abstractmethod
    def forward_logits(
        self,
        x: np.ndarray,
        mode: Mode | str = Mode.INFER,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """
        Raw class scores for one input.

        Args:
            x: A (T, 63) landmark sequence or a (T, H, W, C) frame volume.
            mode: Train enables dropout and batch statistics.
            rng: Dropout generator; required in train mode.
        """
        ...

    @abstractmethod
    def reference_input_shape(self) -> tuple[int, ...]:
        """Shape of the representative input used for estimates and latency."""
        ...

    @abstractmethod
    def activation_sizes(self) -> list[int]:
        """Element counts of the input and every layer output, in forward order."""
        ...

    @abstractmethod
    def flop_estimate(self) -> int:
        """Analytic FLOPs for one inference on the reference input."""
        ...

    def buffers(self) -> dict[str, np.ndarray]:
        """Non-trainable state that must survive a checkpoint round trip."""
        return {}

    def load_buffers(self, buffers: dict[str, np.ndarray]) -> None:
        if buffers:
            raise KeyError(f"unexpected buffers: {sorted(buffers)}")

    def param_count(self) -> int:
        return sum(p.size for p in self.params.values())

    def forward(
        self,
        x: np.ndarray,
        mode: Mode | str = Mode.INFER,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """Class probabilities."""
        return softmax(self.forward_logits(x, mode, rng))

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x, Mode.INFER).data

    def loss(
        self,
        x: np.ndarray,
        label: int,
        mode: Mode | str = Mode.INFER,
        rng: np.random.Generator | None = None,
    ) -> tuple[Tensor, Tensor]:
        """(probabilities, cross-entropy loss) for one labelled input."""
        return softmax_crossentropy(self.forward_logits(x, mode, rng), label)

    def reference_input(self) -> np.ndarray:
        """Deterministic stand-in input with the reference shape."""
        rng = np.random.default_rng(0)
        return rng.uniform(0.0, 1.0, size=self.reference_input_shape())

    @staticmethod
    def _dropout_rng(mode: Mode | str, rng: np.random.Generator | None) -> np.random.Generator | None:
        if Mode(mode) is Mode.TRAIN and rng is None:
            raise ValueError("train mode needs a dropout generator")
        return rng
