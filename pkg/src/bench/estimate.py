"""
Analytic memory and FLOP estimates.

Parameter memory is exact (count x bytes per value). Activation memory is the
peak over consecutive layer pairs, i.e. a layer's input and output alive at
the same time, which bounds every single activation tensor.
"""

from __future__ import annotations

from typing import Sequence

from pydantic import BaseModel, ConfigDict

from src.models.base import GestureModel
from src.models.checkpoint import ModelCheckpoint, as_model


class MemoryEstimate(BaseModel):
    model_config = ConfigDict(extra="forbid")

    param_bytes_f64: int
    param_bytes_f32: int
    activation_bytes_f64: int
    activation_bytes_f32: int

    @property
    def total_bytes_f64(self) -> int:
        return self.param_bytes_f64 + self.activation_bytes_f64

    @property
    def total_bytes_f32(self) -> int:
        return self.param_bytes_f32 + self.activation_bytes_f32

    @classmethod
    def from_counts(cls, param_count: int, activation_sizes: Sequence[int]) -> MemoryEstimate:
        return cls(
            param_bytes_f64=8 * param_count,
            param_bytes_f32=4 * param_count,
            activation_bytes_f64=8 * peak_activation(activation_sizes),
            activation_bytes_f32=4 * peak_activation(activation_sizes),
        )


def peak_activation(sizes: Sequence[int]) -> int:
    """Largest element count held by two adjacent activations."""
    if not sizes:
        return 0
    if len(sizes) == 1:
        return int(sizes[0])
    return int(max(a + b for a, b in zip(sizes, sizes[1:])))


def estimate_memory(source: GestureModel | ModelCheckpoint) -> tuple[MemoryEstimate, int]:
    """(memory estimate, FLOPs per inference) for a model or checkpoint."""
    model = as_model(source)
    memory = MemoryEstimate.from_counts(model.param_count(), model.activation_sizes())
    return memory, model.flop_estimate()
