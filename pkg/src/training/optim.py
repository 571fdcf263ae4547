"""
Adam with bias correction.

adam_step is pure: it returns new parameter arrays and a new moment state,
leaving its inputs untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from src.core.errors import ShapeError
from src.training.config import TrainConfig


@dataclass
class AdamState:
    """First/second moment estimates per parameter name and the step count."""
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0

    @classmethod
    def zeros_like(cls, params: Mapping[str, np.ndarray]) -> AdamState:
        return cls(
            {k: np.zeros_like(p) for k, p in params.items()},
            {k: np.zeros_like(p) for k, p in params.items()},
        )


def adam_step(
    params: Mapping[str, np.ndarray],
    grads: Mapping[str, np.ndarray],
    state: AdamState,
    t: int,
    config: TrainConfig,
) -> tuple[dict[str, np.ndarray], AdamState]:
    """
    One Adam update at step t (t >= 1).

        m = b1 m + (1 - b1) g
        v = b2 v + (1 - b2) g^2
        p = p - lr * m_hat / (sqrt(v_hat) + eps)
    """
    if t < 1:
        raise ValueError(f"Adam step index must be >= 1, got {t}")
    if set(grads) != set(params):
        raise KeyError(f"gradient names {sorted(grads)} != parameter names {sorted(params)}")

    b1, b2 = config.beta1, config.beta2
    bc1 = 1.0 - b1**t
    bc2 = 1.0 - b2**t

    new_params: dict[str, np.ndarray] = {}
    new_state = AdamState(t=t)
    for name, p in params.items():
        g = np.asarray(grads[name], dtype=np.float64)
        if g.shape != p.shape:
            raise ShapeError(f"gradient for {name} has shape {g.shape}, parameter {p.shape}")
        m_prev = state.m.get(name, np.zeros_like(p))
        v_prev = state.v.get(name, np.zeros_like(p))
        m = b1 * m_prev + (1.0 - b1) * g
        v = b2 * v_prev + (1.0 - b2) * (g * g)
        m_hat = m / bc1
        v_hat = v / bc2
        new_params[name] = p - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.eps)
        new_state.m[name] = m
        new_state.v[name] = v
    return new_params, new_state
