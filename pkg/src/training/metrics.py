"""Classification metrics from label/prediction pairs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np


@dataclass
class EvalMetrics:
    """
    Accuracy and per-class precision/recall over one test set.

    confusion[i, j] counts samples of true class i predicted as class j.
    Precision or recall of a class with no predictions/samples is 0.
    """
    accuracy: float
    confusion: np.ndarray
    precision: np.ndarray
    recall: np.ndarray

    @classmethod
    def from_predictions(
        cls,
        labels: Sequence[int] | np.ndarray,
        predictions: Sequence[int] | np.ndarray,
        num_classes: int,
    ) -> EvalMetrics:
        labels = np.asarray(labels, dtype=np.int64)
        predictions = np.asarray(predictions, dtype=np.int64)
        if labels.size == 0:
            raise ValueError("cannot score an empty set")
        if labels.shape != predictions.shape:
            raise ValueError("labels and predictions differ in length")

        confusion = np.zeros((num_classes, num_classes), dtype=np.int64)
        np.add.at(confusion, (labels, predictions), 1)
        tp = np.diag(confusion).astype(np.float64)
        predicted = confusion.sum(axis=0)
        actual = confusion.sum(axis=1)
        precision = np.divide(tp, predicted, out=np.zeros(num_classes), where=predicted > 0)
        recall = np.divide(tp, actual, out=np.zeros(num_classes), where=actual > 0)
        accuracy = float(tp.sum() / labels.size)
        return cls(accuracy, confusion, precision, recall)

    @property
    def total(self) -> int:
        return int(self.confusion.sum())

    @property
    def f1(self) -> np.ndarray:
        denom = self.precision + self.recall
        return np.divide(
            2 * self.precision * self.recall, denom, out=np.zeros_like(denom), where=denom > 0
        )

    @property
    def macro_f1(self) -> float:
        """Mean F1 over classes present in the test set."""
        present = self.confusion.sum(axis=1) > 0
        return float(self.f1[present].mean()) if present.any() else 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "accuracy": self.accuracy,
            "samples": self.total,
            "macro_f1": self.macro_f1,
            "precision": self.precision.tolist(),
            "recall": self.recall.tolist(),
            "confusion": self.confusion.tolist(),
        }
