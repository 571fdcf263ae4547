"""Training hyperparameters."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class TrainConfig(BaseModel):
    """
    Adam and loop settings shared by both model families.

    early_stop_patience counts epochs without improvement of the monitored
    loss (validation loss, or training loss without a validation set);
    0 disables early stopping.
    """
    model_config = ConfigDict(extra="forbid")

    learning_rate: float = Field(1e-3, gt=0.0)
    beta1: float = Field(0.9, gt=0.0, lt=1.0)
    beta2: float = Field(0.999, gt=0.0, lt=1.0)
    eps: float = Field(1e-8, gt=0.0)
    batch_size: int = Field(16, ge=1)
    epochs: int = Field(30, ge=0)
    seed: int = 0
    early_stop_patience: int = Field(5, ge=0)
    val_fraction: float = Field(0.2, ge=0.0, lt=1.0)
