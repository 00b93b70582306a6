"""Minimal dense-tensor autodiff: float64 buffers plus reverse-mode gradients.

Every operation records a backward rule; `Tensor.backward()` walks the
recorded graph in reverse topological order. The op set is exactly what
the layout model needs: broadcasting arithmetic, (batched) matmul,
reductions, stable softmax variants, gathers/scatters, and a few
piecewise-linear selectors.
"""

from __future__ import annotations

import threading
from typing import Callable, Optional, Sequence

import numpy as np

Array = np.ndarray

_grad_state = threading.local()


def grad_enabled() -> bool:
    return getattr(_grad_state, "enabled", True)


class no_grad:
    """Context manager that skips graph recording (inference paths)."""

    def __enter__(self) -> None:
        self._prev = grad_enabled()
        _grad_state.enabled = False

    def __exit__(self, *exc) -> None:
        _grad_state.enabled = self._prev


def _unbroadcast(grad: Array, shape: tuple[int, ...]) -> Array:
    """Sum a broadcasted gradient back down to the original shape."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


class Tensor:
    """A float64 array that may track gradients through recorded ops."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward_fn")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: Optional[Array] = None
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._backward_fn: Optional[Callable[[Array], Sequence[Optional[Array]]]] = None

    @staticmethod
    def _node(data: Array, parents: tuple["Tensor", ...], backward_fn) -> "Tensor":
        out = Tensor(data)
        if grad_enabled() and any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = parents
            out._backward_fn = backward_fn
        return out

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        return float(self.data.item())

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self, grad: Optional[Array] = None) -> None:
        """Accumulate gradients of this (scalar) value into every leaf."""
        if grad is None:
            if self.size != 1:
                raise ValueError("backward() without a seed needs a scalar tensor")
            grad = np.ones_like(self.data)
        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen or not node.requires_grad:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                stack.append((p, False))
        grads: dict[int, Array] = {id(self): np.asarray(grad, dtype=np.float64)}
        for node in reversed(order):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node._backward_fn is None:
                node.grad = g if node.grad is None else node.grad + g
                continue
            for parent, pg in zip(node._parents, node._backward_fn(g)):
                if pg is None or not parent.requires_grad:
                    continue
                key = id(parent)
                if key in grads:
                    grads[key] = grads[key] + pg
                else:
                    grads[key] = pg

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other) -> "Tensor":
        other = as_tensor(other)
        return Tensor._node(
            self.data + other.data,
            (self, other),
            lambda g: (_unbroadcast(g, self.shape), _unbroadcast(g, other.shape)),
        )

    __radd__ = __add__

    def __sub__(self, other) -> "Tensor":
        other = as_tensor(other)
        return Tensor._node(
            self.data - other.data,
            (self, other),
            lambda g: (_unbroadcast(g, self.shape), _unbroadcast(-g, other.shape)),
        )

    def __rsub__(self, other) -> "Tensor":
        return as_tensor(other) - self

    def __mul__(self, other) -> "Tensor":
        other = as_tensor(other)
        return Tensor._node(
            self.data * other.data,
            (self, other),
            lambda g: (
                _unbroadcast(g * other.data, self.shape),
                _unbroadcast(g * self.data, other.shape),
            ),
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Tensor":
        other = as_tensor(other)
        return Tensor._node(
            self.data / other.data,
            (self, other),
            lambda g: (
                _unbroadcast(g / other.data, self.shape),
                _unbroadcast(-g * self.data / (other.data * other.data), other.shape),
            ),
        )

    def __rtruediv__(self, other) -> "Tensor":
        return as_tensor(other) / self

    def __neg__(self) -> "Tensor":
        return Tensor._node(-self.data, (self,), lambda g: (-g,))

    def __pow__(self, exponent: float) -> "Tensor":
        if not isinstance(exponent, (int, float)):
            raise TypeError("only scalar exponents are supported")
        out = self.data**exponent
        return Tensor._node(
            out,
            (self,),
            lambda g: (g * exponent * self.data ** (exponent - 1),),
        )

    def __matmul__(self, other) -> "Tensor":
        other = as_tensor(other)
        a, b = self.data, other.data
        if a.ndim < 2 or b.ndim < 2:
            raise ValueError(
                f"matmul needs >=2-d operands, got shapes {a.shape} and {b.shape}"
            )
        if a.shape[-1] != b.shape[-2]:
            raise ValueError(f"matmul shape mismatch: {a.shape} @ {b.shape}")

        def backward(g: Array):
            ga = _unbroadcast(g @ b.swapaxes(-1, -2), a.shape)
            gb = _unbroadcast(a.swapaxes(-1, -2) @ g, b.shape)
            return ga, gb

        return Tensor._node(a @ b, (self, other), backward)

    # -- shape manipulation --------------------------------------------

    def reshape(self, *shape) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        old = self.shape
        return Tensor._node(
            self.data.reshape(shape), (self,), lambda g: (g.reshape(old),)
        )

    def swapaxes(self, a: int, b: int) -> "Tensor":
        return Tensor._node(
            self.data.swapaxes(a, b), (self,), lambda g: (g.swapaxes(a, b),)
        )

    def __getitem__(self, idx) -> "Tensor":
        def backward(g: Array):
            out = np.zeros_like(self.data)
            out[idx] = g
            return (out,)

        return Tensor._node(self.data[idx], (self,), backward)

    # -- reductions and elementwise maps --------------------------------

    def sum(self, axis=None, keepdims: bool = False) -> "Tensor":
        def backward(g: Array):
            if axis is None:
                return (np.broadcast_to(g, self.shape).copy(),)
            gg = g if keepdims else np.expand_dims(g, axis)
            return (np.broadcast_to(gg, self.shape).copy(),)

        return Tensor._node(self.data.sum(axis=axis, keepdims=keepdims), (self,), backward)

    def mean(self, axis=None, keepdims: bool = False) -> "Tensor":
        count = self.size if axis is None else self.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) / float(count)

    def exp(self) -> "Tensor":
        out = np.exp(self.data)
        return Tensor._node(out, (self,), lambda g: (g * out,))

    def log(self) -> "Tensor":
        return Tensor._node(np.log(self.data), (self,), lambda g: (g / self.data,))

    def sqrt(self) -> "Tensor":
        out = np.sqrt(self.data)
        return Tensor._node(out, (self,), lambda g: (g * 0.5 / out,))

    def tanh(self) -> "Tensor":
        out = np.tanh(self.data)
        return Tensor._node(out, (self,), lambda g: (g * (1.0 - out * out),))

    def relu(self) -> "Tensor":
        mask = self.data > 0
        return Tensor._node(np.where(mask, self.data, 0.0), (self,), lambda g: (g * mask,))

    def abs(self) -> "Tensor":
        return Tensor._node(np.abs(self.data), (self,), lambda g: (g * np.sign(self.data),))


def as_tensor(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


# -- multi-input ops -----------------------------------------------------


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    sizes = [t.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def backward(g: Array):
        return tuple(np.split(g, splits, axis=axis))

    return Tensor._node(
        np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors), backward
    )


def maximum(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    mask = a.data >= b.data
    return Tensor._node(
        np.where(mask, a.data, b.data),
        (a, b),
        lambda g: (
            _unbroadcast(g * mask, a.shape),
            _unbroadcast(g * ~mask, b.shape),
        ),
    )


def minimum(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    mask = a.data <= b.data
    return Tensor._node(
        np.where(mask, a.data, b.data),
        (a, b),
        lambda g: (
            _unbroadcast(g * mask, a.shape),
            _unbroadcast(g * ~mask, b.shape),
        ),
    )


def where(cond: Array, a, b) -> Tensor:
    """Select between two differentiable branches by a constant mask."""
    a, b = as_tensor(a), as_tensor(b)
    cond = np.asarray(cond, dtype=bool)
    return Tensor._node(
        np.where(cond, a.data, b.data),
        (a, b),
        lambda g: (
            _unbroadcast(g * cond, a.shape),
            _unbroadcast(g * ~cond, b.shape),
        ),
    )


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=axis, keepdims=True)

    def backward(g: Array):
        inner = (g * out).sum(axis=axis, keepdims=True)
        return (out * (g - inner),)

    return Tensor._node(out, (x,), backward)


def log_softmax(x: Tensor, axis: int = -1) -> Tensor:
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
    out = shifted - lse

    def backward(g: Array):
        return (g - np.exp(out) * g.sum(axis=axis, keepdims=True),)

    return Tensor._node(out, (x,), backward)


def logsumexp(x: Tensor, axis: int = -1, keepdims: bool = False) -> Tensor:
    """Stable log-sum-exp; the max shift is treated as a constant."""
    shift = x.data.max(axis=axis, keepdims=True)
    out = (x - shift).exp().sum(axis=axis, keepdims=True).log() + shift
    if not keepdims:
        out = out.reshape(np.squeeze(out.data, axis=axis).shape)
    return out


def take(x: Tensor, indices: Array, axis: int = 0) -> Tensor:
    """Gather rows by an integer index array (used for embeddings too)."""
    indices = np.asarray(indices, dtype=np.int64)
    if axis != 0:
        raise NotImplementedError("take only supports axis 0")

    def backward(g: Array):
        out = np.zeros_like(x.data)
        np.add.at(out, indices, g)
        return (out,)

    return Tensor._node(x.data[indices], (x,), backward)


def select_last(x: Tensor, ids: Array) -> Tensor:
    """Pick one entry along the last axis per leading position."""
    ids = np.asarray(ids, dtype=np.int64)
    expanded = np.expand_dims(ids, -1)

    def backward(g: Array):
        out = np.zeros_like(x.data)
        np.put_along_axis(out, expanded, np.expand_dims(g, -1), -1)
        return (out,)

    return Tensor._node(
        np.take_along_axis(x.data, expanded, -1).squeeze(-1), (x,), backward
    )


def segment_sum(x: Tensor, segment_ids: Array, num_segments: int) -> Tensor:
    """Sum rows of a (N, D) tensor into (num_segments, D) buckets."""
    segment_ids = np.asarray(segment_ids, dtype=np.int64)

    def backward(g: Array):
        return (g[segment_ids],)

    out = np.zeros((num_segments,) + x.shape[1:], dtype=np.float64)
    np.add.at(out, segment_ids, x.data)
    return Tensor._node(out, (x,), backward)
