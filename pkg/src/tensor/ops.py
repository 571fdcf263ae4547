"""
Differentiable primitives shared by both gesture models.

Every op takes and returns Tensors, checks shapes up front, and records a
backward closure on the active GradTape when an input is tracked. Layouts are
channels-last: volumes are (T, H, W, C), conv weights (K, kt, kh, kw, Cin),
dense weights (in, out).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.core.errors import KernelTooLargeError, ShapeError, UninitializedStatisticsError
from src.tensor.tensor import Tensor, record

_AXES_3D = ("time", "height", "width")


class Mode(str, Enum):
    """Train mode enables dropout and batch statistics; infer mode is pure."""
    TRAIN = "train"
    INFER = "infer"


class Activation(str, Enum):
    RELU = "relu"
    TANH = "tanh"
    SIGMOID = "sigmoid"
    NONE = "none"


# ---------------------------------------------------------------------------
# Elementwise helpers
# ---------------------------------------------------------------------------

def _same_shape(a: Tensor, b: Tensor, op: str) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{op}: shapes {a.shape} and {b.shape} differ")


def add(a: Tensor, b: Tensor) -> Tensor:
    _same_shape(a, b, "add")
    out = Tensor(a.data + b.data)
    record("add", (a, b), (out,), lambda g: (g[0], g[0]))
    return out


def mul(a: Tensor, b: Tensor) -> Tensor:
    _same_shape(a, b, "mul")
    out = Tensor(a.data * b.data)
    record("mul", (a, b), (out,), lambda g: (g[0] * b.data, g[0] * a.data))
    return out


def scale(x: Tensor, factor: float) -> Tensor:
    out = Tensor(x.data * factor)
    record("scale", (x,), (out,), lambda g: (g[0] * factor,))
    return out


def sum_all(x: Tensor) -> Tensor:
    out = Tensor(np.sum(x.data))
    record("sum", (x,), (out,), lambda g: (np.full_like(x.data, float(g[0])),))
    return out


def flatten(x: Tensor) -> Tensor:
    out = Tensor(x.data.reshape(-1))
    record("flatten", (x,), (out,), lambda g: (g[0].reshape(x.shape),))
    return out


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # tanh form never overflows and gives sigmoid(0) == 0.5 exactly
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def relu(x: Tensor) -> Tensor:
    out = Tensor(np.maximum(x.data, 0.0))
    record("relu", (x,), (out,), lambda g: (g[0] * (x.data > 0.0),))
    return out


def tanh(x: Tensor) -> Tensor:
    y = np.tanh(x.data)
    out = Tensor(y)
    record("tanh", (x,), (out,), lambda g: (g[0] * (1.0 - y * y),))
    return out


def sigmoid(x: Tensor) -> Tensor:
    y = _sigmoid(x.data)
    out = Tensor(y)
    record("sigmoid", (x,), (out,), lambda g: (g[0] * y * (1.0 - y),))
    return out


def activate(x: Tensor, activation: Activation | str) -> Tensor:
    activation = Activation(activation)
    if activation is Activation.RELU:
        return relu(x)
    if activation is Activation.TANH:
        return tanh(x)
    if activation is Activation.SIGMOID:
        return sigmoid(x)
    return x


# ---------------------------------------------------------------------------
# Dense
# ---------------------------------------------------------------------------

def dense(
    x: Tensor,
    weights: Tensor,
    bias: Tensor,
    activation: Activation | str = Activation.NONE,
) -> Tensor:
    """activation(x @ W + b) over the last axis of x."""
    if weights.data.ndim != 2:
        raise ShapeError(f"dense weights must be 2-D, got {weights.shape}")
    n_in, n_out = weights.shape
    if x.shape[-1] != n_in:
        raise ShapeError(
            f"dense: input width {x.shape[-1]} does not match weights {weights.shape}",
            axis=x.data.ndim - 1,
        )
    if bias.shape != (n_out,):
        raise ShapeError(f"dense: bias shape {bias.shape} != ({n_out},)", axis=0)

    out = Tensor(x.data @ weights.data + bias.data)

    def _backward(g: tuple[np.ndarray, ...]):
        g2 = g[0].reshape(-1, n_out)
        x2 = x.data.reshape(-1, n_in)
        return (
            (g2 @ weights.data.T).reshape(x.shape),
            x2.T @ g2,
            g2.sum(axis=0),
        )

    record("dense", (x, weights, bias), (out,), _backward)
    return activate(out, activation)


# ---------------------------------------------------------------------------
# Softmax / cross-entropy
# ---------------------------------------------------------------------------

def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - np.max(z))
    return e / np.sum(e)


def softmax(logits: Tensor) -> Tensor:
    if logits.data.ndim != 1:
        raise ShapeError(f"softmax expects a 1-D logit vector, got {logits.shape}")
    p = _softmax(logits.data)
    out = Tensor(p)
    record("softmax", (logits,), (out,), lambda g: (p * (g[0] - np.sum(g[0] * p)),))
    return out


def softmax_crossentropy(logits: Tensor, label: int) -> tuple[Tensor, Tensor]:
    """Probabilities and the scalar loss -ln(p[label])."""
    if logits.data.ndim != 1:
        raise ShapeError(f"softmax_crossentropy expects 1-D logits, got {logits.shape}")
    n_classes = logits.shape[0]
    if not 0 <= label < n_classes:
        raise ValueError(f"label {label} out of range for {n_classes} classes")

    shifted = logits.data - np.max(logits.data)
    e = np.exp(shifted)
    total = np.sum(e)
    probs = e / total
    loss = Tensor(np.log(total) - shifted[label])

    def _backward(g: tuple[np.ndarray, ...]):
        d = probs.copy()
        d[label] -= 1.0
        return (d * float(g[0]),)

    record("softmax_crossentropy", (logits,), (loss,), _backward)
    return Tensor(probs), loss


# ---------------------------------------------------------------------------
# Dropout
# ---------------------------------------------------------------------------

def dropout(x: Tensor, rate: float, mode: Mode | str, rng: np.random.Generator) -> Tensor:
    """Inverted dropout: survivors are scaled by 1/(1-rate) so inference is identity."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if Mode(mode) is Mode.INFER or rate == 0.0:
        return x

    keep = 1.0 - rate
    mask = rng.random(x.shape) >= rate
    out = Tensor(np.where(mask, x.data / keep, 0.0))
    record("dropout", (x,), (out,), lambda g: (np.where(mask, g[0] / keep, 0.0),))
    return out


# ---------------------------------------------------------------------------
# 3D convolution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Conv3dSpec:
    """Valid-padding 3D convolution geometry."""
    in_channels: int
    out_channels: int
    kernel: tuple[int, int, int] = (3, 3, 3)
    stride: tuple[int, int, int] = (1, 1, 1)
    padding: str = "valid"

    def __post_init__(self) -> None:
        if self.in_channels < 1 or self.out_channels < 1:
            raise ValueError("conv channel counts must be >= 1")
        if len(self.kernel) != 3 or any(k < 1 for k in self.kernel):
            raise ValueError(f"kernel dims must be >= 1, got {self.kernel}")
        if len(self.stride) != 3 or any(s < 1 for s in self.stride):
            raise ValueError(f"stride dims must be >= 1, got {self.stride}")
        if self.padding != "valid":
            raise ValueError(f"only 'valid' padding is supported, got {self.padding!r}")

    @property
    def weight_shape(self) -> tuple[int, int, int, int, int]:
        return (self.out_channels, *self.kernel, self.in_channels)

    def output_dims(self, in_dims: tuple[int, int, int]) -> tuple[int, int, int]:
        """floor((in - k) / s) + 1 per axis."""
        out = []
        for axis, d, k, s in zip(_AXES_3D, in_dims, self.kernel, self.stride):
            if d < k:
                raise KernelTooLargeError(f"kernel {k} exceeds input size {d}", axis=axis)
            out.append((d - k) // s + 1)
        return tuple(out)  # type: ignore[return-value]


def conv3d(x: Tensor, spec: Conv3dSpec, weights: Tensor, bias: Tensor) -> Tensor:
    """Valid 3D cross-correlation of a (T, H, W, Cin) volume into (T', H', W', K)."""
    if x.data.ndim != 4:
        raise ShapeError(f"conv3d input must be (T, H, W, C), got {x.shape}")
    if x.shape[3] != spec.in_channels:
        raise ShapeError(
            f"conv3d input has {x.shape[3]} channels, spec expects {spec.in_channels}",
            axis="channels",
        )
    if weights.shape != spec.weight_shape:
        for i, (got, want) in enumerate(zip(weights.shape, spec.weight_shape)):
            if got != want:
                raise ShapeError(
                    f"conv3d weights {weights.shape} do not match spec {spec.weight_shape}",
                    axis=i,
                )
        raise ShapeError(f"conv3d weights must be rank 5, got {weights.shape}")
    if bias.shape != (spec.out_channels,):
        raise ShapeError(f"conv3d bias shape {bias.shape} != ({spec.out_channels},)", axis=0)

    to, ho, wo = spec.output_dims(x.shape[:3])
    kt, kh, kw = spec.kernel
    st, sh, sw = spec.stride
    w = weights.data

    # (T', H', W', Cin, kt, kh, kw)
    windows = sliding_window_view(x.data, (kt, kh, kw), axis=(0, 1, 2))[::st, ::sh, ::sw]
    out = Tensor(np.tensordot(windows, w, axes=([3, 4, 5, 6], [4, 1, 2, 3])) + bias.data)

    def _backward(g: tuple[np.ndarray, ...]):
        go = g[0]
        d_w = np.tensordot(go, windows, axes=([0, 1, 2], [0, 1, 2])).transpose(0, 2, 3, 4, 1)
        d_b = go.sum(axis=(0, 1, 2))
        d_x = np.zeros_like(x.data)
        for a in range(kt):
            for b in range(kh):
                for c in range(kw):
                    d_x[
                        a : a + st * (to - 1) + 1 : st,
                        b : b + sh * (ho - 1) + 1 : sh,
                        c : c + sw * (wo - 1) + 1 : sw,
                        :,
                    ] += go @ w[:, a, b, c, :]
        return d_x, d_w, d_b

    record("conv3d", (x, weights, bias), (out,), _backward)
    return out


# ---------------------------------------------------------------------------
# 3D max pooling
# ---------------------------------------------------------------------------

def maxpool3d(
    x: Tensor,
    window: tuple[int, int, int] = (2, 2, 2),
) -> tuple[Tensor, np.ndarray]:
    """
    Non-overlapping max pool (stride = window) over (T, H, W, C).

    Trailing elements that do not fill a window are dropped. Returns the pooled
    tensor and, per output element, the row-major index of the winner inside
    its window; ties go to the lowest index.
    """
    if x.data.ndim != 4:
        raise ShapeError(f"maxpool3d input must be (T, H, W, C), got {x.shape}")
    if len(window) != 3 or any(k < 1 for k in window):
        raise ValueError(f"pool window dims must be >= 1, got {window}")
    for axis, d, k in zip(_AXES_3D, x.shape[:3], window):
        if d < k:
            raise KernelTooLargeError(f"pool window {k} exceeds input size {d}", axis=axis)

    wt, wh, ww = window
    t, h, w, c = x.shape
    to, ho, wo = t // wt, h // wh, w // ww
    cropped = x.data[: to * wt, : ho * wh, : wo * ww, :]
    blocks = (
        cropped.reshape(to, wt, ho, wh, wo, ww, c)
        .transpose(0, 2, 4, 6, 1, 3, 5)
        .reshape(to, ho, wo, c, wt * wh * ww)
    )
    argmax = np.argmax(blocks, axis=-1)
    out = Tensor(np.take_along_axis(blocks, argmax[..., None], axis=-1)[..., 0])

    def _backward(g: tuple[np.ndarray, ...]):
        g_blocks = np.zeros_like(blocks)
        np.put_along_axis(g_blocks, argmax[..., None], g[0][..., None], axis=-1)
        d_x = np.zeros_like(x.data)
        d_x[: to * wt, : ho * wh, : wo * ww, :] = (
            g_blocks.reshape(to, ho, wo, c, wt, wh, ww)
            .transpose(0, 4, 1, 5, 2, 6, 3)
            .reshape(to * wt, ho * wh, wo * ww, c)
        )
        return (d_x,)

    record("maxpool3d", (x,), (out,), _backward)
    return out, argmax


# ---------------------------------------------------------------------------
# Batch normalization
# ---------------------------------------------------------------------------

@dataclass
class BatchNormState:
    """Per-channel running statistics."""
    running_mean: np.ndarray
    running_var: np.ndarray
    num_updates: int = 0

    @classmethod
    def fresh(cls, channels: int) -> BatchNormState:
        return cls(np.zeros(channels), np.ones(channels), 0)

    @property
    def initialized(self) -> bool:
        return self.num_updates > 0

    def copy(self) -> BatchNormState:
        return BatchNormState(self.running_mean.copy(), self.running_var.copy(), self.num_updates)


BN_EPS = 1e-5
BN_MOMENTUM = 0.1


def batchnorm(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    state: BatchNormState,
    mode: Mode | str,
    eps: float = BN_EPS,
    momentum: float = BN_MOMENTUM,
) -> Tensor:
    """Normalize over every axis but the last (channel) axis."""
    channels = x.shape[-1]
    for label, arr in (
        ("gamma", gamma.data),
        ("beta", beta.data),
        ("running_mean", state.running_mean),
        ("running_var", state.running_var),
    ):
        if arr.shape != (channels,):
            raise ShapeError(f"batchnorm {label} shape {arr.shape} != ({channels},)", axis=0)

    axes = tuple(range(x.data.ndim - 1))
    g_data = gamma.data

    if Mode(mode) is Mode.TRAIN:
        n = x.size // channels
        mean = x.data.mean(axis=axes)
        var = x.data.var(axis=axes)
        inv_std = 1.0 / np.sqrt(var + eps)
        x_hat = (x.data - mean) * inv_std
        state.running_mean = (1.0 - momentum) * state.running_mean + momentum * mean
        state.running_var = (1.0 - momentum) * state.running_var + momentum * var
        state.num_updates += 1

        def _backward(g: tuple[np.ndarray, ...]):
            go = g[0]
            d_hat = go * g_data
            d_x = (inv_std / n) * (
                n * d_hat - d_hat.sum(axis=axes) - x_hat * (d_hat * x_hat).sum(axis=axes)
            )
            return d_x, (go * x_hat).sum(axis=axes), go.sum(axis=axes)
    else:
        if not state.initialized:
            raise UninitializedStatisticsError(
                "batchnorm inference requested before any train-mode update"
            )
        inv_std = 1.0 / np.sqrt(state.running_var + eps)
        x_hat = (x.data - state.running_mean) * inv_std

        def _backward(g: tuple[np.ndarray, ...]):
            go = g[0]
            return go * g_data * inv_std, (go * x_hat).sum(axis=axes), go.sum(axis=axes)

    out = Tensor(g_data * x_hat + beta.data)
    record("batchnorm", (x, gamma, beta), (out,), _backward)
    return out


# ---------------------------------------------------------------------------
# Fused LSTM cell
# ---------------------------------------------------------------------------

def lstm_cell(
    x: Tensor,
    h_prev: Tensor,
    c_prev: Tensor,
    w: Tensor,
    u: Tensor,
    b: Tensor,
) -> tuple[Tensor, Tensor]:
    """
    One LSTM step, gate order (i, f, g, o).

    z = W x + U h + b; c = f*c_prev + i*g; h = o*tanh(c).
    """
    hidden = h_prev.shape[0]
    if w.data.ndim != 2 or w.shape[0] != 4 * hidden:
        raise ShapeError(f"LSTM input weights {w.shape} do not match hidden size {hidden}", axis=0)
    if x.shape != (w.shape[1],):
        raise ShapeError(f"LSTM input {x.shape} does not match weights {w.shape}", axis=0)
    if u.shape != (4 * hidden, hidden):
        raise ShapeError(f"LSTM recurrent weights {u.shape} != {(4 * hidden, hidden)}")
    if b.shape != (4 * hidden,) or c_prev.shape != (hidden,):
        raise ShapeError("LSTM bias or cell state does not match hidden size", axis=0)

    z = w.data @ x.data + u.data @ h_prev.data + b.data
    i = _sigmoid(z[:hidden])
    f = _sigmoid(z[hidden : 2 * hidden])
    gg = np.tanh(z[2 * hidden : 3 * hidden])
    o = _sigmoid(z[3 * hidden :])
    c = f * c_prev.data + i * gg
    tc = np.tanh(c)
    h = o * tc
    h_out, c_out = Tensor(h), Tensor(c)

    def _backward(g: tuple[np.ndarray, ...]):
        dh, dc_in = g
        dc = dc_in + dh * o * (1.0 - tc * tc)
        dz = np.concatenate(
            [
                dc * gg * i * (1.0 - i),
                dc * c_prev.data * f * (1.0 - f),
                dc * i * (1.0 - gg * gg),
                dh * tc * o * (1.0 - o),
            ]
        )
        return (
            w.data.T @ dz,
            u.data.T @ dz,
            dc * f,
            np.outer(dz, x.data),
            np.outer(dz, h_prev.data),
            dz,
        )

    record("lstm_cell", (x, h_prev, c_prev, w, u, b), (h_out, c_out), _backward)
    return h_out, c_out


__all__ = [
    "Activation",
    "BatchNormState",
    "Conv3dSpec",
    "Mode",
    "activate",
    "add",
    "batchnorm",
    "conv3d",
    "dense",
    "dropout",
    "flatten",
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
