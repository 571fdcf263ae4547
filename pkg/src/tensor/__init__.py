"""
Tensor core: float64 arrays, the layer primitives both gesture models use,
and reverse-mode gradients with a finite-difference checker.
"""

from src.tensor.gradcheck import as_params, grad_check
from src.tensor.ops import (
    Activation,
    BatchNormState,
    Conv3dSpec,
    Mode,
    activate,
    add,
    batchnorm,
    conv3d,
    dense,
    dropout,
    flatten,
    lstm_cell,
    maxpool3d,
    mul,
    relu,
    scale,
    sigmoid,
    softmax,
    softmax_crossentropy,
    sum_all,
    tanh,
)
from src.tensor.tensor import GradTape, Tensor, active_tape, backward

__all__ = [
    "Activation",
    "BatchNormState",
    "Conv3dSpec",
    "GradTape",
    "Mode",
    "Tensor",
    "activate",
    "active_tape",
    "add",
    "as_params",
    "backward",
    "batchnorm",
    "conv3d",
    "dense",
    "dropout",
    "flatten",
    "grad_check",
    "lstm_cell",
    "maxpool3d",
    "mul",
    "relu",
    "scale",
    "sigmoid",
    "softmax",
    "softmax_crossentropy",
    "sum_all",
    "tanh",
]
