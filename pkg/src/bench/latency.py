"""Single-input inference latency with percentile summaries."""

from __future__ import annotations

import time
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.errors import ModalityMismatchError
from src.models.base import GestureModel, Modality
from src.models.checkpoint import ModelCheckpoint, as_model

INPUT_RANK = {Modality.LANDMARKS: 2, Modality.VOLUMES: 4}


class LatencyStats(BaseModel):
    """Wall-clock milliseconds per single-input inference."""
    model_config = ConfigDict(extra="forbid")

    trials: int = Field(ge=1)
    mean_ms: float
    p50_ms: float
    p95_ms: float
    min_ms: float

    @model_validator(mode="after")
    def _ordered(self) -> LatencyStats:
        if not self.min_ms <= self.p50_ms <= self.p95_ms:
            raise ValueError("latency stats must satisfy min <= p50 <= p95")
        return self

    @classmethod
    def from_timings(cls, timings_ms: list[float]) -> LatencyStats:
        arr = np.asarray(timings_ms, dtype=np.float64)
        if arr.size == 0:
            raise ValueError("need at least one timing")
        return cls(
            trials=int(arr.size),
            mean_ms=float(arr.mean()),
            p50_ms=float(np.percentile(arr, 50)),
            p95_ms=float(np.percentile(arr, 95)),
            min_ms=float(arr.min()),
        )


def measure_latency(
    source: GestureModel | ModelCheckpoint,
    sample: Optional[np.ndarray] = None,
    trials: int = 100,
    warmup: int = 10,
) -> LatencyStats:
    """
    Time `trials` infer-mode forwards on one input after `warmup` untimed runs.

    Runs on the calling thread. sample defaults to the model's reference input.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if warmup < 0:
        raise ValueError(f"warmup must be >= 0, got {warmup}")
    model = as_model(source)
    x = model.reference_input() if sample is None else np.asarray(sample, dtype=np.float64)
    if x.ndim != INPUT_RANK[model.modality]:
        raise ModalityMismatchError(
            f"{model.family.value} consumes {model.modality.value}; got an input of rank {x.ndim}"
        )

    for _ in range(warmup):
        model.predict_proba(x)

    timings_ms = []
    for _ in range(trials):
        start = time.perf_counter()
        model.predict_proba(x)
        timings_ms.append((time.perf_counter() - start) * 1000.0)
    return LatencyStats.from_timings(timings_ms)
