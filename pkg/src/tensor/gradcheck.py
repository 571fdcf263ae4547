"""Central finite-difference check of tape gradients."""

from __future__ import annotations

from typing import Callable, Mapping

import numpy as np

from src.tensor.tensor import GradTape, Tensor, backward


def grad_check(
    forward: Callable[[], Tensor],
    params: Mapping[str, Tensor],
    h: float = 1e-6,
) -> float:
    """
    Max relative error between tape gradients and central differences.

    forward must be deterministic (dropout in infer mode or a fixed mask) and
    return a scalar loss. Relative error per coordinate is
    |a - n| / max(1e-12, |a| + |n|).
    """
    with GradTape() as tape:
        loss = forward()
    analytic = backward(tape, loss, params)

    worst = 0.0
    for name, param in params.items():
        flat = param.data.reshape(-1)
        grad = analytic[name].reshape(-1)
        for idx in range(flat.size):
            original = flat[idx]
            flat[idx] = original + h
            plus = forward().item()
            flat[idx] = original - h
            minus = forward().item()
            flat[idx] = original
            numeric = (plus - minus) / (2.0 * h)
            a = grad[idx]
            err = abs(a - numeric) / max(1e-12, abs(a) + abs(numeric))
            worst = max(worst, float(err))
    return worst


def as_params(**arrays: np.ndarray) -> dict[str, Tensor]:
    """Wrap arrays as tracked tensors, keyed by name."""
    return {name: Tensor(arr, requires_grad=True, name=name) for name, arr in arrays.items()}
