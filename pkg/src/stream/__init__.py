"""Live translation: sliding-window inference with confidence gating and debounce."""

from src.stream.pipeline import (
    DEFAULT_CHARSET,
    EventKind,
    PredictionEvent,
    StreamConfig,
    StreamPipeline,
    assemble_sentence,
)

__all__ = [
    "DEFAULT_CHARSET",
    "EventKind",
    "PredictionEvent",
    "StreamConfig",
    "StreamPipeline",
    "assemble_sentence",
]
