"""
Training loop and evaluation for both model families.

One loop serves the landmark LSTM and the frame-volume 3D CNN: per-sample
forward/backward on a fresh tape, batch-mean gradients reduced in sample
order, Adam updates, and model selection on the monitored loss.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from src.core.errors import ConfigurationError, ModalityMismatchError
from src.core.logging import StructuredLogger
from src.data.dataset import GestureDataset
from src.models.base import GestureModel
from src.models.checkpoint import ModelCheckpoint, as_model
from src.tensor import GradTape, Mode, backward
from src.training.config import TrainConfig
from src.training.metrics import EvalMetrics
from src.training.optim import AdamState, adam_step

log = StructuredLogger(__name__)


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    train_accuracy: float
    val_loss: Optional[float]
    val_accuracy: Optional[float]
    seconds: float = field(compare=False)


@dataclass
class TrainHistory:
    records: list[EpochRecord] = field(default_factory=list)
    best_epoch: Optional[int] = None
    stopped_early: bool = False

    def __len__(self) -> int:
        return len(self.records)

    def to_records(self) -> list[dict[str, Any]]:
        return [asdict(r) for r in self.records]


EpochCallback = Callable[[EpochRecord], None]


def _check_dataset(model: GestureModel, dataset: GestureDataset, what: str) -> None:
    if dataset.modality is not model.modality:
        raise ModalityMismatchError(
            f"{what} holds {dataset.modality.value}, "
            f"{model.family.value} model needs {model.modality.value}"
        )
    if len(dataset) == 0:
        raise ValueError(f"{what} is empty")
    top = int(dataset.labels.max())
    if top >= model.num_classes:
        raise ConfigurationError(
            f"{what} has label {top} but the model has {model.num_classes} classes"
        )


def score(model: GestureModel, dataset: GestureDataset) -> tuple[float, float]:
    """(mean cross-entropy, accuracy) in infer mode."""
    total_loss = 0.0
    correct = 0
    for sample in dataset:
        probs, loss = model.loss(sample.array, sample.label, Mode.INFER)
        total_loss += loss.item()
        correct += int(np.argmax(probs.data) == sample.label)
    return total_loss / len(dataset), correct / len(dataset)


def train(
    model: GestureModel,
    train_set: GestureDataset,
    val_set: Optional[GestureDataset] = None,
    config: Optional[TrainConfig] = None,
    on_epoch: Optional[EpochCallback] = None,
) -> tuple[ModelCheckpoint, TrainHistory]:
    """
    Train in place and return the best checkpoint with the epoch history.

    The monitored loss is the validation loss when val_set is given, the
    training loss otherwise. The model object is left at its final weights;
    the returned checkpoint holds the best ones.
    """
    config = config or TrainConfig()
    _check_dataset(model, train_set, "training set")
    if val_set is not None and len(val_set) == 0:
        val_set = None
    if val_set is not None:
        _check_dataset(model, val_set, "validation set")

    history = TrainHistory()
    best = ModelCheckpoint.from_model(model)
    if config.epochs == 0:
        return best, history

    shuffle_rng = np.random.default_rng(config.seed)
    dropout_rng = np.random.default_rng([config.seed, 1])
    names = list(model.params)
    state = AdamState.zeros_like({k: model.params[k].data for k in names})
    step = 0
    best_loss = np.inf
    waited = 0

    log.info(
        "training started",
        family=model.family.value,
        params=model.param_count(),
        samples=len(train_set),
        epochs=config.epochs,
    )
    for epoch in range(1, config.epochs + 1):
        started = time.perf_counter()
        order = shuffle_rng.permutation(len(train_set))
        loss_sum = 0.0
        correct = 0

        for lo in range(0, len(order), config.batch_size):
            batch = order[lo : lo + config.batch_size]
            grad_sum = {k: np.zeros_like(model.params[k].data) for k in names}
            for idx in batch:
                sample = train_set[int(idx)]
                with GradTape() as tape:
                    probs, loss = model.loss(sample.array, sample.label, Mode.TRAIN, dropout_rng)
                grads = backward(tape, loss, model.params)
                for k in names:
                    grad_sum[k] += grads[k]
                loss_sum += loss.item()
                correct += int(np.argmax(probs.data) == sample.label)

            step += 1
            mean_grads = {k: g / len(batch) for k, g in grad_sum.items()}
            current = {k: model.params[k].data for k in names}
            updated, state = adam_step(current, mean_grads, state, step, config)
            for k in names:
                model.params[k].data = updated[k]

        train_loss = loss_sum / len(train_set)
        train_acc = correct / len(train_set)
        val_loss: Optional[float] = None
        val_acc: Optional[float] = None
        if val_set is not None:
            val_loss, val_acc = score(model, val_set)

        record = EpochRecord(
            epoch, train_loss, train_acc, val_loss, val_acc, time.perf_counter() - started
        )
        history.records.append(record)
        log.info("epoch done", **asdict(record))
        if on_epoch is not None:
            on_epoch(record)

        monitored = val_loss if val_loss is not None else train_loss
        if monitored < best_loss:
            best_loss = monitored
            best = ModelCheckpoint.from_model(model)
            history.best_epoch = epoch
            waited = 0
        else:
            waited += 1
            if config.early_stop_patience and waited >= config.early_stop_patience:
                history.stopped_early = True
                log.info("early stop", epoch=epoch, best_epoch=history.best_epoch)
                break

    return best, history


def evaluate(source: GestureModel | ModelCheckpoint, test_set: GestureDataset) -> EvalMetrics:
    """Infer-mode argmax predictions (lowest index wins ties) scored against labels."""
    model = as_model(source)
    _check_dataset(model, test_set, "test set")
    predictions = [int(np.argmax(model.predict_proba(s.array))) for s in test_set]
    metrics = EvalMetrics.from_predictions(test_set.labels, predictions, model.num_classes)
    log.info("evaluated", family=model.family.value, samples=len(test_set), accuracy=metrics.accuracy)
    return metrics
