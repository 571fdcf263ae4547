"""
Frame-volume classifier: stacked (conv3d -> batchnorm -> relu -> maxpool3d)
blocks, then flatten -> relu dense -> dropout -> output dense -> softmax.
"""

from __future__ import annotations

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.core.errors import ConfigurationError, GestureBenchError, ShapeError
from src.models.base import GestureModel, ModelFamily, uniform_init
from src.tensor import (
    Activation,
    BatchNormState,
    Conv3dSpec,
    Mode,
    Tensor,
    batchnorm,
    conv3d,
    dense,
    dropout,
    flatten,
    maxpool3d,
    relu,
)

Dims3 = tuple[int, int, int]
Dims4 = tuple[int, int, int, int]


def _positive(v: tuple[int, ...]) -> tuple[int, ...]:
    if any(d < 1 for d in v):
        raise ValueError(f"all dims must be >= 1, got {v}")
    return v


class ConvBlockConfig(BaseModel):
    """One conv -> bn -> relu (-> pool) block."""
    model_config = ConfigDict(extra="forbid")

    out_channels: int = Field(8, ge=1)
    kernel: Dims3 = (3, 3, 3)
    stride: Dims3 = (1, 1, 1)
    pool: bool = True
    pool_window: Dims3 = (2, 2, 2)

    @field_validator("kernel", "stride", "pool_window")
    @classmethod
    def _positive_dims(cls, v: Dims3) -> Dims3:
        return _positive(v)  # type: ignore[return-value]


class Cnn3dConfig(BaseModel):
    """Architecture of the frame-volume 3D CNN."""
    model_config = ConfigDict(extra="forbid")

    input_dims: Dims4 = (16, 32, 32, 1)
    blocks: list[ConvBlockConfig] = Field(
        default_factory=lambda: [
            ConvBlockConfig(out_channels=8),
            ConvBlockConfig(out_channels=16),
        ],
        min_length=1,
    )
    dense_size: int = Field(128, ge=1)
    dropout_rate: float = Field(0.4, ge=0.0, lt=1.0)
    num_classes: int = Field(36, ge=2)

    @field_validator("input_dims")
    @classmethod
    def _positive_dims(cls, v: Dims4) -> Dims4:
        return _positive(v)  # type: ignore[return-value]

    @classmethod
    def full_scale(cls, num_classes: int = 36) -> Cnn3dConfig:
        """30 RGB frames of 128 x 128, three blocks."""
        return cls(
            input_dims=(30, 128, 128, 3),
            blocks=[
                ConvBlockConfig(out_channels=8),
                ConvBlockConfig(out_channels=16),
                ConvBlockConfig(out_channels=32),
            ],
            num_classes=num_classes,
        )

    def conv_specs(self) -> list[Conv3dSpec]:
        specs = []
        channels = self.input_dims[3]
        for block in self.blocks:
            specs.append(
                Conv3dSpec(channels, block.out_channels, tuple(block.kernel), tuple(block.stride))
            )
            channels = block.out_channels
        return specs

    def layer_shapes(self) -> list[tuple[str, Dims4]]:
        """
        Shape after every conv and pool, in forward order.

        Raises ConfigurationError when any dim would drop below 1.
        """
        t, h, w, _ = self.input_dims
        shapes: list[tuple[str, Dims4]] = []
        for k, (block, spec) in enumerate(zip(self.blocks, self.conv_specs())):
            try:
                t, h, w = spec.output_dims((t, h, w))
            except GestureBenchError as exc:
                raise ConfigurationError(f"block {k} conv: {exc}") from exc
            shapes.append((f"block{k}.conv", (t, h, w, block.out_channels)))
            if block.pool:
                if any(d < p for d, p in zip((t, h, w), block.pool_window)):
                    raise ConfigurationError(
                        f"block {k} pool window {block.pool_window} exceeds {(t, h, w)}"
                    )
                t, h, w = (d // p for d, p in zip((t, h, w), block.pool_window))
                shapes.append((f"block{k}.pool", (t, h, w, block.out_channels)))
        return shapes

    def flat_size(self) -> int:
        return int(np.prod(self.layer_shapes()[-1][1]))


def cnn3d_param_count(config: Cnn3dConfig) -> int:
    total = 0
    for spec in config.conv_specs():
        total += int(np.prod(spec.weight_shape)) + spec.out_channels
        total += 2 * spec.out_channels
    flat = config.flat_size()
    total += flat * config.dense_size + config.dense_size
    total += config.dense_size * config.num_classes + config.num_classes
    return total


class Cnn3dModel(GestureModel):
    """3D CNN over (T, H, W, C) frame volumes."""

    family = ModelFamily.CNN3D

    def __init__(self, config: Cnn3dConfig | None = None, seed: int = 0):
        super().__init__()
        self.config = config or Cnn3dConfig()
        self.shapes = self.config.layer_shapes()
        self.specs = self.config.conv_specs()
        rng = np.random.default_rng(seed)

        self.bn_states: list[BatchNormState] = []
        for k, spec in enumerate(self.specs):
            fan_in = int(np.prod(spec.kernel)) * spec.in_channels
            self._add(f"block{k}.conv.W", uniform_init(rng, spec.weight_shape, fan_in))
            self._add(f"block{k}.conv.b", np.zeros(spec.out_channels))
            self._add(f"block{k}.bn.gamma", np.ones(spec.out_channels))
            self._add(f"block{k}.bn.beta", np.zeros(spec.out_channels))
            self.bn_states.append(BatchNormState.fresh(spec.out_channels))

        flat = self.config.flat_size()
        d = self.config.dense_size
        self._add("dense.W", uniform_init(rng, (flat, d), flat))
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

    # -- buffers ------------------------------------------------------------

    def buffers(self) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {}
        for k, state in enumerate(self.bn_states):
            out[f"block{k}.bn.running_mean"] = state.running_mean.copy()
            out[f"block{k}.bn.running_var"] = state.running_var.copy()
            out[f"block{k}.bn.num_updates"] = np.array([float(state.num_updates)])
        return out

    def load_buffers(self, buffers: dict[str, np.ndarray]) -> None:
        expected = set(self.buffers())
        if set(buffers) != expected:
            raise KeyError(f"buffer names {sorted(buffers)} != {sorted(expected)}")
        for k, state in enumerate(self.bn_states):
            state.running_mean = np.array(buffers[f"block{k}.bn.running_mean"], dtype=np.float64)
            state.running_var = np.array(buffers[f"block{k}.bn.running_var"], dtype=np.float64)
            state.num_updates = int(buffers[f"block{k}.bn.num_updates"][0])

    # -- forward ------------------------------------------------------------

    def _check_volume(self, volume: np.ndarray) -> np.ndarray:
        volume = np.asarray(volume, dtype=np.float64)
        if volume.ndim != 4:
            raise ShapeError(f"frame volume must be (T, H, W, C), got {volume.shape}")
        for axis, got, want in zip(("time", "height", "width", "channels"), volume.shape, self.config.input_dims):
            if got != want:
                raise ShapeError(f"volume {volume.shape} != configured {self.config.input_dims}", axis=axis)
        return volume

    def forward_logits(
        self,
        x: np.ndarray,
        mode: Mode | str = Mode.INFER,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        rng = self._dropout_rng(mode, rng)
        h = Tensor(self._check_volume(x))
        for k, (block, spec) in enumerate(zip(self.config.blocks, self.specs)):
            h = conv3d(h, spec, self.params[f"block{k}.conv.W"], self.params[f"block{k}.conv.b"])
            h = batchnorm(
                h,
                self.params[f"block{k}.bn.gamma"],
                self.params[f"block{k}.bn.beta"],
                self.bn_states[k],
                mode,
            )
            h = relu(h)
            if block.pool:
                h, _ = maxpool3d(h, tuple(block.pool_window))
        h = dense(flatten(h), self.params["dense.W"], self.params["dense.b"], Activation.RELU)
        h = dropout(h, self.config.dropout_rate, mode, rng)  # type: ignore[arg-type]
        return dense(h, self.params["out.W"], self.params["out.b"])

    # -- estimates ----------------------------------------------------------

    def reference_input_shape(self) -> tuple[int, ...]:
        return tuple(self.config.input_dims)

    def activation_sizes(self) -> list[int]:
        sizes = [int(np.prod(self.config.input_dims))]
        sizes += [int(np.prod(shape)) for _, shape in self.shapes]
        sizes += [self.config.dense_size, self.config.num_classes]
        return sizes

    def flop_estimate(self) -> int:
        flops = 0
        for (name, shape) in self.shapes:
            if not name.endswith(".conv"):
                continue
            k = int(name[len("block") : -len(".conv")])
            spec = self.specs[k]
            per_voxel = 2 * int(np.prod(spec.kernel)) * spec.in_channels
            flops += per_voxel * int(np.prod(shape))  # shape includes K output channels
        flops += 2 * self.config.flat_size() * self.config.dense_size
        flops += 2 * self.config.dense_size * self.config.num_classes
        return flops


def cnn3d_forward(
    model: Cnn3dModel,
    volume: np.ndarray,
    mode: Mode | str = Mode.INFER,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Class probabilities for one frame volume."""
    return model.forward(volume, mode, rng).data
