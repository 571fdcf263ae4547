"""
Tensor carrier and reverse-mode gradient tape.

A Tensor wraps a contiguous float64 numpy array. Primitive ops (see ops.py)
record themselves on the innermost active GradTape when any input requires a
gradient; backward() replays the tape in exact reverse order.

Usage:
    with GradTape() as tape:
        loss = model.loss(x, label)
    grads = backward(tape, loss, model.params)
"""

from __future__ import annotations

import contextvars
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from src.core.errors import ShapeError

BackwardFn = Callable[[tuple[np.ndarray, ...]], tuple["np.ndarray | None", ...]]


class Tensor:
    """N-dimensional float64 array, optionally tracked for gradients."""

    __slots__ = ("data", "requires_grad", "name")

    def __init__(self, data: Any, requires_grad: bool = False, name: str | None = None):
        arr = np.ascontiguousarray(data, dtype=np.float64)
        if any(d < 1 for d in arr.shape):
            raise ShapeError(f"tensor dims must be positive, got {arr.shape}")
        self.data = arr
        self.requires_grad = requires_grad
        self.name = name

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return int(self.data.size)

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(()))

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{label}, requires_grad={self.requires_grad})"


@dataclass
class TapeEntry:
    """One executed primitive."""
    op: str
    inputs: tuple[Tensor, ...]
    outputs: tuple[Tensor, ...]
    backward_fn: BackwardFn


@dataclass
class GradTape:
    """Ordered record of primitive ops executed while the tape is active."""
    entries: list[TapeEntry] = field(default_factory=list)
    _token: contextvars.Token | None = field(default=None, repr=False)

    def __enter__(self) -> GradTape:
        self._token = _active_tape.set(self)
        return self

    def __exit__(self, *exc: object) -> None:
        if self._token is not None:
            _active_tape.reset(self._token)
            self._token = None

    def record(
        self,
        op: str,
        inputs: Sequence[Tensor],
        outputs: Sequence[Tensor],
        backward_fn: BackwardFn,
    ) -> None:
        self.entries.append(TapeEntry(op, tuple(inputs), tuple(outputs), backward_fn))

    def __len__(self) -> int:
        return len(self.entries)


_active_tape: contextvars.ContextVar[GradTape | None] = contextvars.ContextVar(
    "gesturebench_active_tape", default=None
)


def active_tape() -> GradTape | None:
    return _active_tape.get()


def record(
    op: str,
    inputs: Sequence[Tensor],
    outputs: Sequence[Tensor],
    backward_fn: BackwardFn,
) -> None:
    """Record an op on the active tape if any input is tracked; marks outputs tracked."""
    if not any(t.requires_grad for t in inputs):
        return
    for out in outputs:
        out.requires_grad = True
    tape = _active_tape.get()
    if tape is not None:
        tape.record(op, inputs, outputs, backward_fn)


def backward(
    tape: GradTape,
    loss: Tensor,
    params: Mapping[str, Tensor] | None = None,
) -> dict[str, np.ndarray]:
    """
    Reverse-mode gradients of a scalar loss.

    Returns one gradient per named parameter, shaped like the parameter.
    Parameters the loss does not depend on get zeros.
    """
    if loss.size != 1:
        raise ShapeError(f"backward needs a scalar loss, got shape {loss.shape}")

    grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    for entry in reversed(tape.entries):
        out_grads = [grads.pop(id(out), None) for out in entry.outputs]
        if all(g is None for g in out_grads):
            continue
        filled = tuple(
            g if g is not None else np.zeros_like(out.data)
            for g, out in zip(out_grads, entry.outputs)
        )
        in_grads = entry.backward_fn(filled)
        for tensor, g in zip(entry.inputs, in_grads):
            if g is None or not tensor.requires_grad:
                continue
            key = id(tensor)
            if key in grads:
                grads[key] = grads[key] + g
            else:
                grads[key] = g

    if params is None:
        return {}
    result: dict[str, np.ndarray] = {}
    for name, param in params.items():
        g = grads.get(id(param))
        result[name] = np.zeros_like(param.data) if g is None else g.reshape(param.shape)
    return result
