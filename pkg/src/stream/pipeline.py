"""
Streaming gesture recognition over landmark frames.

Frames go into a ring buffer of window_len. Every infer_every accepted
frames (once the buffer is full) the classifier scores the latest window and
a candidate event is produced. A character is emitted when:

- the last stability_count candidates share one class, each with
  confidence >= confidence_threshold;
- at least cooldown_frames frames have passed since the previous emit;
- the streak started after a release. An emit disarms the pipeline; a
  candidate below threshold, or one for the rest class, releases it. A held
  gesture emits once, and a window straddling two gestures cannot chain
  straight off the previous emit.

With rest_class set, the classifier has one extra class meaning "no sign in
this window"; it never emits and the charset covers the other classes only.

Timing is counted in frames, never wall-clock, so replays are identical.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Iterable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.core.errors import ConfigurationError, GestureBenchError, ModalityMismatchError
from src.data.landmarks import FEATURES_PER_FRAME, is_normalized, normalize_landmarks
from src.models.base import GestureModel, Modality
from src.models.checkpoint import ModelCheckpoint, as_model

logger = logging.getLogger(__name__)

DEFAULT_CHARSET = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"

Classifier = Callable[[np.ndarray], np.ndarray]


class StreamConfig(BaseModel):
    """
    Gating for the live translator. charset defaults to A-Z then 0-9, cut to
    the number of sign classes (C, or C - 1 when rest_class is set).
    """
    model_config = ConfigDict(extra="forbid")

    window_len: int = Field(30, ge=1)
    infer_every: int = Field(5, ge=1)
    confidence_threshold: float = Field(0.7, gt=0.0, le=1.0)
    stability_count: int = Field(3, ge=1)
    cooldown_frames: int = Field(15, ge=1)
    charset: Optional[str] = None
    rest_class: Optional[int] = Field(None, ge=0)

    def resolved_charset(self, num_classes: int) -> str:
        signs = num_classes if self.rest_class is None else num_classes - 1
        if self.rest_class is not None and self.rest_class >= num_classes:
            raise ConfigurationError(f"rest_class {self.rest_class} out of range for {num_classes} classes")
        charset = self.charset if self.charset is not None else DEFAULT_CHARSET[:signs]
        if len(charset) != signs:
            raise ConfigurationError(f"charset has {len(charset)} characters for {signs} sign classes")
        return charset

    def class_chars(self, num_classes: int) -> list[str]:
        """Character per class index; the rest class maps to ''."""
        chars = list(self.resolved_charset(num_classes))
        if self.rest_class is not None:
            chars.insert(self.rest_class, "")
        return chars


class EventKind(str, Enum):
    CANDIDATE = "candidate"
    EMIT = "emit"
    REJECTED = "rejected"


@dataclass(frozen=True)
class PredictionEvent:
    kind: EventKind
    at_frame: int
    class_index: int = -1
    char: str = ""
    confidence: float = 0.0
    reason: str = ""

    def to_dict(self) -> dict[str, Any]:
        if self.kind is EventKind.REJECTED:
            return {"kind": self.kind.value, "at_frame": self.at_frame, "reason": self.reason}
        return {
            "kind": self.kind.value,
            "class": self.class_index,
            "char": self.char,
            "confidence": self.confidence,
            "at_frame": self.at_frame,
        }


class StreamPipeline:
    """
    Stateful frame-by-frame recognizer. Not reentrant; one instance per stream.

    at_frame is the 0-based index of the pushed frame that produced an event,
    counting rejected frames too.
    """

    def __init__(
        self,
        classifier: Classifier,
        num_classes: int,
        config: Optional[StreamConfig] = None,
    ):
        self.classifier = classifier
        self.num_classes = num_classes
        self.config = config or StreamConfig()
        self.charset = self.config.resolved_charset(num_classes)
        self._chars = self.config.class_chars(num_classes)
        self.reset()

    @classmethod
    def from_model(
        cls,
        source: GestureModel | ModelCheckpoint,
        config: Optional[StreamConfig] = None,
    ) -> StreamPipeline:
        model = as_model(source)
        if model.modality is not Modality.LANDMARKS:
            raise ModalityMismatchError(
                f"stream input is landmark frames; {model.family.value} consumes {model.modality.value}"
            )
        return cls(model.predict_proba, model.num_classes, config)

    def reset(self) -> None:
        self._buffer: deque[np.ndarray] = deque(maxlen=self.config.window_len)
        self._pushed = 0
        self._accepted = 0
        self._streak_class = -1
        self._streak = 0
        self._last_emit: Optional[int] = None
        self._armed = True

    # -- frames -------------------------------------------------------------

    def _prepare(self, frame: Any) -> np.ndarray:
        arr = np.asarray(frame, dtype=np.float64).reshape(-1)
        if arr.size != FEATURES_PER_FRAME:
            raise ValueError(f"frame has {arr.size} values, expected {FEATURES_PER_FRAME}")
        if is_normalized(arr, tol=1e-6):
            return arr
        return normalize_landmarks(arr)

    def reject(self, reason: str) -> PredictionEvent:
        """Count an unusable input line as a frame and report it."""
        at = self._pushed
        self._pushed += 1
        logger.debug("rejected frame %d: %s", at, reason)
        return PredictionEvent(EventKind.REJECTED, at, reason=reason)

    def push_frame(self, frame: Any) -> list[PredictionEvent]:
        """Add one frame; return the events it produced, in order."""
        try:
            arr = self._prepare(frame)
        except (GestureBenchError, ValueError, TypeError) as exc:
            return [self.reject(str(exc))]

        at = self._pushed
        self._pushed += 1
        self._buffer.append(arr)
        self._accepted += 1
        if len(self._buffer) < self.config.window_len or self._accepted % self.config.infer_every:
            return []
        return self._infer(at)

    def _infer(self, at: int) -> list[PredictionEvent]:
        probs = np.asarray(self.classifier(np.stack(self._buffer)), dtype=np.float64).reshape(-1)
        if probs.size != self.num_classes:
            raise ConfigurationError(f"classifier returned {probs.size} scores for {self.num_classes} classes")
        cls_idx = int(np.argmax(probs))
        confidence = float(np.clip(probs[cls_idx], 0.0, 1.0))
        events = [PredictionEvent(EventKind.CANDIDATE, at, cls_idx, self._chars[cls_idx], confidence)]

        if confidence < self.config.confidence_threshold or cls_idx == self.config.rest_class:
            self._armed = True
            self._streak_class, self._streak = -1, 0
            return events
        if not self._armed:
            return events
        if cls_idx == self._streak_class:
            self._streak += 1
        else:
            self._streak_class, self._streak = cls_idx, 1

        cooled = self._last_emit is None or at - self._last_emit >= self.config.cooldown_frames
        if self._streak >= self.config.stability_count and cooled:
            events.append(PredictionEvent(EventKind.EMIT, at, cls_idx, self._chars[cls_idx], confidence))
            self._last_emit = at
            self._armed = False
            self._streak_class, self._streak = -1, 0
        return events

    def run(self, frames: Iterable[Any]) -> list[PredictionEvent]:
        events: list[PredictionEvent] = []
        for frame in frames:
            events.extend(self.push_frame(frame))
        return events


def assemble_sentence(events: Iterable[PredictionEvent]) -> str:
    """Characters of emit events, in order."""
    return "".join(e.char for e in events if e.kind is EventKind.EMIT)
