"""
LSTM vs 3D CNN comparison report.

- ModelMetrics: measured figures for one model
- ComparisonReport: both models plus derived ratios and trend flags
- render_report: byte-stable JSON or an aligned text table
"""

from __future__ import annotations

import json
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from src.bench.estimate import MemoryEstimate, estimate_memory
from src.bench.latency import LatencyStats, measure_latency
from src.core.logging import StructuredLogger
from src.data.dataset import GestureDataset
from src.models.base import GestureModel, ModelFamily
from src.models.checkpoint import ModelCheckpoint, as_model
from src.training.trainer import evaluate

log = StructuredLogger(__name__)


class BenchConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    trials: int = Field(100, ge=1)
    warmup: int = Field(10, ge=0)


class ModelMetrics(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: ModelFamily
    input_shape: list[int]
    accuracy: Optional[float] = Field(None, ge=0.0, le=1.0)
    latency: LatencyStats
    per_frame_ms: float
    param_count: int
    memory: MemoryEstimate
    flop_estimate: int


class Trends(BaseModel):
    """Whether the expected orderings hold: cnn accuracy >=, cnn slower, cnn larger."""
    model_config = ConfigDict(extra="forbid")

    accuracy: bool
    latency: bool
    params: bool


class Derived(BaseModel):
    model_config = ConfigDict(extra="forbid")

    latency_ratio: float
    accuracy_delta: Optional[float]
    param_ratio: float
    trends: Trends


class ComparisonReport(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lstm: ModelMetrics
    cnn3d: ModelMetrics
    derived: Derived


def _ratio(num: float, den: float) -> float:
    if den == 0:
        return float("inf") if num > 0 else 1.0
    return num / den


def collect_metrics(
    source: GestureModel | ModelCheckpoint,
    test_set: Optional[GestureDataset] = None,
    trials: int = 100,
    warmup: int = 10,
) -> ModelMetrics:
    """Latency, size, memory, FLOPs and (given a test set) accuracy for one model."""
    model = as_model(source)
    accuracy = evaluate(model, test_set).accuracy if test_set is not None else None
    latency = measure_latency(model, None, trials, warmup)
    memory, flops = estimate_memory(model)
    shape = list(model.reference_input_shape())
    metrics = ModelMetrics(
        family=model.family,
        input_shape=shape,
        accuracy=accuracy,
        latency=latency,
        per_frame_ms=latency.p50_ms / shape[0],
        param_count=model.param_count(),
        memory=memory,
        flop_estimate=flops,
    )
    log.info(
        "measured",
        family=model.family.value,
        p50_ms=latency.p50_ms,
        params=metrics.param_count,
        flops=flops,
    )
    return metrics


def compare(lstm: ModelMetrics, cnn: ModelMetrics) -> ComparisonReport:
    """
    Derived figures use the p50 latency. accuracy_delta is cnn minus lstm in
    percentage points, None unless both accuracies are known.
    """
    if lstm.family is not ModelFamily.LSTM or cnn.family is not ModelFamily.CNN3D:
        raise ValueError(f"compare needs (lstm, cnn3d) metrics, got ({lstm.family}, {cnn.family})")
    both = lstm.accuracy is not None and cnn.accuracy is not None
    delta = (cnn.accuracy - lstm.accuracy) * 100.0 if both else None  # type: ignore[operator]
    trends = Trends(
        accuracy=bool(both and cnn.accuracy >= lstm.accuracy),  # type: ignore[operator]
        latency=cnn.latency.p50_ms > lstm.latency.p50_ms,
        params=cnn.param_count > lstm.param_count,
    )
    derived = Derived(
        latency_ratio=_ratio(cnn.latency.p50_ms, lstm.latency.p50_ms),
        accuracy_delta=delta,
        param_ratio=_ratio(cnn.param_count, lstm.param_count),
        trends=trends,
    )
    return ComparisonReport(lstm=lstm, cnn3d=cnn, derived=derived)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

LABEL_WIDTH = 28
COLUMN_WIDTH = 26


def _dims(shape: list[int]) -> str:
    return " x ".join(str(d) for d in shape)


def _pct(acc: Optional[float]) -> str:
    return "n/a" if acc is None else f"{acc * 100:.1f}%"


def _mb(n_bytes: int) -> str:
    return f"{n_bytes / 1e6:.3f} MB"


def _rate(ms: float) -> str:
    return "n/a" if ms <= 0 else f"{1000.0 / ms:.1f} windows/s"


def table_rows(report: ComparisonReport) -> list[tuple[str, str, str]]:
    """(row label, lstm value, cnn value) in display order."""
    a, b = report.lstm, report.cnn3d
    return [
        ("Input", f"landmarks {_dims(a.input_shape)}", f"frames {_dims(b.input_shape)}"),
        ("Accuracy", _pct(a.accuracy), _pct(b.accuracy)),
        ("Computation", f"{a.flop_estimate / 1e6:.2f} MFLOPs", f"{b.flop_estimate / 1e6:.2f} MFLOPs"),
        ("Latency p50", f"{a.latency.p50_ms:.3f} ms", f"{b.latency.p50_ms:.3f} ms"),
        ("Latency p95", f"{a.latency.p95_ms:.3f} ms", f"{b.latency.p95_ms:.3f} ms"),
        ("Latency per frame", f"{a.per_frame_ms:.3f} ms", f"{b.per_frame_ms:.3f} ms"),
        ("Real-Time Capability", _rate(a.latency.p50_ms), _rate(b.latency.p50_ms)),
        ("Model Size", f"{a.param_count:,} params", f"{b.param_count:,} params"),
        ("Weights (64-bit)", _mb(a.memory.param_bytes_f64), _mb(b.memory.param_bytes_f64)),
        ("Weights (32-bit)", _mb(a.memory.param_bytes_f32), _mb(b.memory.param_bytes_f32)),
        ("Peak activations (64-bit)", _mb(a.memory.activation_bytes_f64), _mb(b.memory.activation_bytes_f64)),
    ]


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def render_text(report: ComparisonReport) -> str:
    def row(label: str, left: str, right: str) -> str:
        return f"{label:<{LABEL_WIDTH}}{left:<{COLUMN_WIDTH}}{right}".rstrip()

    d = report.derived
    delta = "n/a" if d.accuracy_delta is None else f"{d.accuracy_delta:+.2f}"
    lines = [row("Parameters", "LSTM Model", "3D CNN Model")]
    lines.append("-" * (LABEL_WIDTH + 2 * COLUMN_WIDTH))
    lines.extend(row(*r) for r in table_rows(report))
    lines.append("")
    lines.append(f"Latency ratio (cnn/lstm): {d.latency_ratio:.2f}")
    lines.append(f"Accuracy delta (points):  {delta}")
    lines.append(f"Param ratio (cnn/lstm):   {d.param_ratio:.2f}")
    lines.append(
        f"Trends: accuracy={_yes(d.trends.accuracy)} "
        f"latency={_yes(d.trends.latency)} params={_yes(d.trends.params)}"
    )
    return "\n".join(lines) + "\n"


def render_report(report: ComparisonReport, fmt: Literal["json", "text"] = "json") -> bytes:
    """JSON with sorted keys (byte-stable), or the aligned text table."""
    if fmt == "json":
        payload = report.model_dump(mode="json")
        return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode("utf-8")
    if fmt == "text":
        return render_text(report).encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")


def parse_report(data: bytes | str) -> ComparisonReport:
    return ComparisonReport.model_validate_json(data)


__all__ = [
    "BenchConfig",
    "ComparisonReport",
    "Derived",
    "ModelMetrics",
    "Trends",
    "collect_metrics",
    "compare",
    "parse_report",
    "render_report",
    "render_text",
    "table_rows",
]
