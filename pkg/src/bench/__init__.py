"""Latency, memory and FLOP measurement plus the LSTM vs 3D CNN comparison report."""

from src.bench.estimate import MemoryEstimate, estimate_memory, peak_activation
from src.bench.latency import LatencyStats, measure_latency
from src.bench.report import (
    BenchConfig,
    ComparisonReport,
    Derived,
    ModelMetrics,
    Trends,
    collect_metrics,
    compare,
    parse_report,
    render_report,
    render_text,
    table_rows,
)

__all__ = [
    "BenchConfig",
    "ComparisonReport",
    "Derived",
    "LatencyStats",
    "MemoryEstimate",
    "ModelMetrics",
    "Trends",
    "collect_metrics",
    "compare",
    "estimate_memory",
    "measure_latency",
    "parse_report",
    "peak_activation",
    "render_report",
    "render_text",
    "table_rows",
]
