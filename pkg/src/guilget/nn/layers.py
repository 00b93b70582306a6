"""Transformer building blocks on top of the autodiff tensor core.

Layers use pre-normalization residual wiring. Attention masks are additive
arrays broadcast onto the (batch, head, query, key) score tensor; padding
masks use a large negative bias rather than -inf so fully masked rows stay
finite.
"""

from __future__ import annotations

import math

import numpy as np

from guilget.nn.tensor import Tensor, softmax, take

NEG_BIAS = -1e9


class Module:
    """Parameter container; children are discovered from attributes."""

    def parameters(self) -> dict[str, Tensor]:
        out: dict[str, Tensor] = {}
        for name, value in vars(self).items():
            if isinstance(value, Tensor) and value.requires_grad:
                out[name] = value
            elif isinstance(value, Module):
                for sub, t in value.parameters().items():
                    out[f"{name}.{sub}"] = t
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        for sub, t in item.parameters().items():
                            out[f"{name}.{i}.{sub}"] = t
        return out


class Linear(Module):
    def __init__(self, rng: np.random.Generator, d_in: int, d_out: int, zero_init: bool = False):
        if zero_init:
            w = np.zeros((d_in, d_out))
        else:
            bound = 1.0 / math.sqrt(d_in)
            w = rng.uniform(-bound, bound, size=(d_in, d_out))
        self.weight = Tensor(w, requires_grad=True)
        self.bias = Tensor(np.zeros(d_out), requires_grad=True)

    def __call__(self, x: Tensor) -> Tensor:
        return x @ self.weight + self.bias


class Embedding(Module):
    def __init__(self, rng: np.random.Generator, vocab: int, dim: int):
        self.weight = Tensor(rng.normal(0.0, 0.02, size=(vocab, dim)), requires_grad=True)

    def __call__(self, ids: np.ndarray) -> Tensor:
        return take(self.weight, ids, axis=0)


class LayerNorm(Module):
    def __init__(self, dim: int, eps: float = 1e-5):
        self.gamma = Tensor(np.ones(dim), requires_grad=True)
        self.beta = Tensor(np.zeros(dim), requires_grad=True)
        self.eps = eps

    def __call__(self, x: Tensor) -> Tensor:
        mu = x.mean(axis=-1, keepdims=True)
        centered = x - mu
        var = (centered * centered).mean(axis=-1, keepdims=True)
        return centered / (var + self.eps).sqrt() * self.gamma + self.beta


class Dropout:
    """Inverted dropout; a no-op unless a training rng is supplied."""

    def __init__(self, rate: float):
        self.rate = rate

    def __call__(self, x: Tensor, rng: np.random.Generator | None) -> Tensor:
        if rng is None or self.rate <= 0.0:
            return x
        keep = 1.0 - self.rate
        mask = (rng.random(x.shape) < keep) / keep
        return x * mask


class MultiHeadAttention(Module):
    def __init__(self, rng: np.random.Generator, d_model: int, n_heads: int):
        if d_model % n_heads != 0:
            raise ValueError(f"d_model {d_model} not divisible by n_heads {n_heads}")
        self.n_heads = n_heads
        self.d_head = d_model // n_heads
        self.wq = Linear(rng, d_model, d_model)
        self.wk = Linear(rng, d_model, d_model)
        self.wv = Linear(rng, d_model, d_model)
        self.wo = Linear(rng, d_model, d_model)

    def _split(self, x: Tensor) -> Tensor:
        b, t, _ = x.shape
        return x.reshape(b, t, self.n_heads, self.d_head).swapaxes(1, 2)

    def __call__(self, q: Tensor, k: Tensor, v: Tensor, mask: np.ndarray | None = None) -> Tensor:
        b, tq, d = q.shape
        qh, kh, vh = self._split(self.wq(q)), self._split(self.wk(k)), self._split(self.wv(v))
        scores = qh @ kh.swapaxes(-1, -2) / math.sqrt(self.d_head)
        if mask is not None:
            scores = scores + mask
        attn = softmax(scores, axis=-1)
        mixed = (attn @ vh).swapaxes(1, 2).reshape(b, tq, d)
        return self.wo(mixed)


class FeedForward(Module):
    def __init__(self, rng: np.random.Generator, d_model: int, d_hidden: int):
        self.up = Linear(rng, d_model, d_hidden)
        self.down = Linear(rng, d_hidden, d_model)

    def __call__(self, x: Tensor) -> Tensor:
        return self.down(self.up(x).relu())


class EncoderLayer(Module):
    def __init__(self, rng: np.random.Generator, d_model: int, n_heads: int, d_ffn: int, dropout: float):
        self.attn = MultiHeadAttention(rng, d_model, n_heads)
        self.ffn = FeedForward(rng, d_model, d_ffn)
        self.norm1 = LayerNorm(d_model)
        self.norm2 = LayerNorm(d_model)
        self.drop = Dropout(dropout)

    def __call__(self, x: Tensor, mask: np.ndarray | None, rng: np.random.Generator | None) -> Tensor:
        h = self.norm1(x)
        x = x + self.drop(self.attn(h, h, h, mask), rng)
        x = x + self.drop(self.ffn(self.norm2(x)), rng)
        return x


class DecoderLayer(Module):
    def __init__(self, rng: np.random.Generator, d_model: int, n_heads: int, d_ffn: int, dropout: float):
        self.self_attn = MultiHeadAttention(rng, d_model, n_heads)
        self.cross_attn = MultiHeadAttention(rng, d_model, n_heads)
        self.ffn = FeedForward(rng, d_model, d_ffn)
        self.norm1 = LayerNorm(d_model)
        self.norm2 = LayerNorm(d_model)
        self.norm3 = LayerNorm(d_model)
        self.drop = Dropout(dropout)

    def __call__(
        self,
        x: Tensor,
        memory: Tensor,
        self_mask: np.ndarray | None,
        cross_mask: np.ndarray | None,
        rng: np.random.Generator | None,
    ) -> Tensor:
        h = self.norm1(x)
        x = x + self.drop(self.self_attn(h, h, h, self_mask), rng)
        x = x + self.drop(self.cross_attn(self.norm2(x), memory, memory, cross_mask), rng)
        x = x + self.drop(self.ffn(self.norm3(x)), rng)
        return x


def causal_mask(t: int) -> np.ndarray:
    """Additive (1, 1, t, t) bias that hides future positions."""
    mask = np.triu(np.full((t, t), NEG_BIAS), k=1)
    return mask[None, None, :, :]


def padding_bias(real: np.ndarray) -> np.ndarray:
    """Additive (B, 1, 1, T) bias hiding padded key positions."""
    return np.where(real[:, None, None, :], 0.0, NEG_BIAS)


def sinusoid_encoding(t: int, dim: int) -> np.ndarray:
    """Classic fixed sin/cos position table of shape (t, dim)."""
    pos = np.arange(t, dtype=np.float64)[:, None]
    i = np.arange(dim, dtype=np.float64)[None, :]
    angles = pos / np.power(10000.0, (2 * (i // 2)) / dim)
    out = np.empty((t, dim))
    out[:, 0::2] = np.sin(angles[:, 0::2])
    out[:, 1::2] = np.cos(angles[:, 1::2])
    return out


