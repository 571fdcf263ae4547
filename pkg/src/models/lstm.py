"""
Landmark-sequence classifier: stacked LSTM layers, dropout on the final hidden
state, a relu dense layer and a softmax output over the gesture classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.core.errors import ShapeError
from src.models.base import GestureModel, ModelFamily, uniform_init
from src.tensor import Activation, Mode, Tensor, dense, dropout, lstm_cell

LayerState = tuple[Tensor, Tensor]


class LstmConfig(BaseModel):
    """Architecture of the landmark LSTM."""
    model_config = ConfigDict(extra="forbid")

    input_size: int = Field(63, ge=1)
    hidden_sizes: list[int] = Field(default_factory=lambda: [64, 128], min_length=1)
    dropout_rate: float = Field(0.3, ge=0.0, lt=1.0)
    dense_size: int = Field(64, ge=1)
    num_classes: int = Field(36, ge=2)
    window_len: int = Field(30, ge=1)  # reference length for estimates and latency

    @field_validator("hidden_sizes")
    @classmethod
    def _positive_widths(cls, v: list[int]) -> list[int]:
        if any(h < 1 for h in v):
            raise ValueError("hidden sizes must be >= 1")
        return v


@dataclass
class LstmLayerParams:
    """W (4h x in), U (4h x h), b (4h), gate order i, f, g, o."""
    w: Tensor
    u: Tensor
    b: Tensor

    @property
    def hidden_size(self) -> int:
        return self.u.shape[1]


def lstm_cell_step(
    x_t: np.ndarray,
    h_prev: np.ndarray,
    c_prev: np.ndarray,
    layer: LstmLayerParams,
) -> tuple[np.ndarray, np.ndarray]:
    """One untracked LSTM step on plain arrays; returns (h_t, c_t)."""
    h, c = lstm_cell(Tensor(x_t), Tensor(h_prev), Tensor(c_prev), layer.w, layer.u, layer.b)
    return h.data, c.data


def lstm_param_count(config: LstmConfig) -> int:
    total = 0
    n_in = config.input_size
    for h in config.hidden_sizes:
        total += 4 * h * (n_in + h + 1)
        n_in = h
    total += n_in * config.dense_size + config.dense_size
    total += config.dense_size * config.num_classes + config.num_classes
    return total


class LstmModel(GestureModel):
    """Stacked LSTM over (T, input_size) landmark sequences."""

    family = ModelFamily.LSTM

    def __init__(self, config: LstmConfig | None = None, seed: int = 0):
        super().__init__()
        self.config = config or LstmConfig()
        rng = np.random.default_rng(seed)

        n_in = self.config.input_size
        for k, h in enumerate(self.config.hidden_sizes):
            bias = np.zeros(4 * h)
            bias[h : 2 * h] = 1.0  # forget gate
            self._add(f"lstm{k}.W", uniform_init(rng, (4 * h, n_in), n_in))
            self._add(f"lstm{k}.U", uniform_init(rng, (4 * h, h), h))
            self._add(f"lstm{k}.b", bias)
            n_in = h

        d = self.config.dense_size
        self._add("dense.W", uniform_init(rng, (n_in, d), n_in))
        self._add("dense.b", np.zeros(d))
        self._add("out.W", uniform_init(rng, (d, self.config.num_classes), d))
        self._add("out.b", np.zeros(self.config.num_classes))

    def _add(self, name: str, value: np.ndarray) -> None:
        self.params[name] = Tensor(value, requires_grad=True, name=name)

    @property
    def num_classes(self) -> int:
        return self.config.num_classes

    def config_dict(self) -> dict[str, Any]:
        return self.config.model_dump(mode="json")

    def layer(self, k: int) -> LstmLayerParams:
        return LstmLayerParams(
            self.params[f"lstm{k}.W"], self.params[f"lstm{k}.U"], self.params[f"lstm{k}.b"]
        )

    # -- forward ------------------------------------------------------------

    def _check_sequence(self, seq: np.ndarray) -> np.ndarray:
        seq = np.asarray(seq, dtype=np.float64)
        if seq.ndim != 2:
            raise ShapeError(f"landmark sequence must be (T, features), got {seq.shape}")
        if seq.shape[0] < 1:
            raise ShapeError("landmark sequence is empty", axis="time")
        if seq.shape[1] != self.config.input_size:
            raise ShapeError(
                f"sequence has {seq.shape[1]} features, model expects {self.config.input_size}",
                axis="features",
            )
        return seq

    def initial_state(self) -> list[LayerState]:
        return [(Tensor(np.zeros(h)), Tensor(np.zeros(h))) for h in self.config.hidden_sizes]

    def run_layers(
        self,
        seq: np.ndarray,
        state: list[LayerState] | None = None,
    ) -> tuple[Tensor, list[LayerState]]:
        """
        Run every layer over all steps of seq, threading (h, c) per layer.

        Returns the top layer's last hidden state and the carried state, so a
        sequence can be processed in chunks with identical results.
        """
        seq = self._check_sequence(seq)
        state = state or self.initial_state()
        inputs = [Tensor(row) for row in seq]
        carried: list[LayerState] = []
        for k in range(len(self.config.hidden_sizes)):
            layer = self.layer(k)
            h, c = state[k]
            outputs = []
            for x_t in inputs:
                h, c = lstm_cell(x_t, h, c, layer.w, layer.u, layer.b)
                outputs.append(h)
            carried.append((h, c))
            inputs = outputs
        return inputs[-1], carried

    def head(
        self,
        h_last: Tensor,
        mode: Mode | str = Mode.INFER,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """Dropout, relu dense, output dense; returns logits."""
        x = dropout(h_last, self.config.dropout_rate, mode, rng)  # type: ignore[arg-type]
        x = dense(x, self.params["dense.W"], self.params["dense.b"], Activation.RELU)
        return dense(x, self.params["out.W"], self.params["out.b"])

    def forward_logits(
        self,
        x: np.ndarray,
        mode: Mode | str = Mode.INFER,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        rng = self._dropout_rng(mode, rng)
        h_last, _ = self.run_layers(x)
        return self.head(h_last, mode, rng)

    # -- estimates ----------------------------------------------------------

    def reference_input_shape(self) -> tuple[int, ...]:
        return (self.config.window_len, self.config.input_size)

    def activation_sizes(self) -> list[int]:
        t = self.config.window_len
        sizes = [t * self.config.input_size]
        sizes += [t * h for h in self.config.hidden_sizes]
        sizes += [self.config.dense_size, self.config.num_classes]
        return sizes

    def flop_estimate(self) -> int:
        t = self.config.window_len
        flops = 0
        n_in = self.config.input_size
        for h in self.config.hidden_sizes:
            flops += t * 2 * 4 * h * (n_in + h)
            n_in = h
        flops += 2 * n_in * self.config.dense_size
        flops += 2 * self.config.dense_size * self.config.num_classes
        return flops


def lstm_forward(
    model: LstmModel,
    seq: np.ndarray,
    mode: Mode | str = Mode.INFER,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Class probabilities for one landmark sequence."""
    return model.forward(seq, mode, rng).data
