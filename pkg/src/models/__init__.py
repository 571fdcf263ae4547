"""
Gesture classifiers.

- LstmModel: landmark sequences (T x 63)
- Cnn3dModel: frame volumes (T x H x W x C)
"""

from __future__ import annotations

from typing import Any

from src.models.base import FAMILY_MODALITY, GestureModel, Modality, ModelFamily
from src.models.checkpoint import ModelCheckpoint, as_model
from src.models.cnn3d import Cnn3dConfig, Cnn3dModel, ConvBlockConfig, cnn3d_forward, cnn3d_param_count
from src.models.lstm import (
    LstmConfig,
    LstmLayerParams,
    LstmModel,
    lstm_cell_step,
    lstm_forward,
    lstm_param_count,
)

ModelConfig = LstmConfig | Cnn3dConfig

CONFIG_TYPES: dict[ModelFamily, type[LstmConfig] | type[Cnn3dConfig]] = {
    ModelFamily.LSTM: LstmConfig,
    ModelFamily.CNN3D: Cnn3dConfig,
}


def parse_model_config(family: ModelFamily | str, data: dict[str, Any] | None) -> ModelConfig:
    """Validate a plain config dict against the family's config class."""
    return CONFIG_TYPES[ModelFamily(family)].model_validate(data or {})


def build_model(
    family: ModelFamily | str,
    config: ModelConfig | dict[str, Any] | None = None,
    seed: int = 0,
) -> GestureModel:
    """Instantiate a freshly initialized model of the given family."""
    family = ModelFamily(family)
    if config is None or isinstance(config, dict):
        config = parse_model_config(family, config)
    if family is ModelFamily.LSTM:
        if not isinstance(config, LstmConfig):
            raise TypeError(f"lstm needs an LstmConfig, got {type(config).__name__}")
        return LstmModel(config, seed=seed)
    if not isinstance(config, Cnn3dConfig):
        raise TypeError(f"cnn3d needs a Cnn3dConfig, got {type(config).__name__}")
    return Cnn3dModel(config, seed=seed)


__all__ = [
    "CONFIG_TYPES",
    "Cnn3dConfig",
    "Cnn3dModel",
    "ConvBlockConfig",
    "FAMILY_MODALITY",
    "GestureModel",
    "LstmConfig",
    "LstmLayerParams",
    "LstmModel",
    "ModelCheckpoint",
    "Modality",
    "ModelConfig",
    "ModelFamily",
    "as_model",
    "build_model",
    "cnn3d_forward",
    "cnn3d_param_count",
    "lstm_cell_step",
    "lstm_forward",
    "lstm_param_count",
    "parse_model_config",
]
