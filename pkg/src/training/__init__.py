"""Adam optimization, the shared training loop and evaluation metrics."""

from src.training.config import TrainConfig
from src.training.metrics import EvalMetrics
from src.training.optim import AdamState, adam_step
from src.training.trainer import EpochRecord, TrainHistory, evaluate, score, train

__all__ = [
    "AdamState",
    "EpochRecord",
    "EvalMetrics",
    "TrainConfig",
    "TrainHistory",
    "adam_step",
    "evaluate",
    "score",
    "train",
]
