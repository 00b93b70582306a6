"""The three stages: token predictor, mixture-head generator, box refiner."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from guilget.model.config import ModelConfig
from guilget.nn.checkpoint import load_checkpoint, save_checkpoint
from guilget.nn.layers import (
    DecoderLayer,
    Dropout,
    Embedding,
    EncoderLayer,
    LayerNorm,
    Linear,
    Module,
    MultiHeadAttention,
    causal_mask,
    sinusoid_encoding,
)
from guilget.nn.tensor import Tensor, concat, log_softmax


@dataclass
class PredictorOutput:
    features: Tensor  # (B, T, d_model) contextual features
    sizes: Tensor  # (B, T, 2) predicted (w, h), standardized
    positions: Tensor  # (B, T, 2) predicted (x, y), standardized
    recon: dict[str, Tensor]  # per-stream reconstruction logits


@dataclass
class MixtureHead:
    """Bivariate mixture over one coordinate pair per sequence step."""

    log_weights: Tensor  # (B, T, K) log mixture weights
    mean: Tensor  # (B, T, K, 2)
    sigma: Tensor  # (B, T, K, 2), positive
    corr: Tensor  # (B, T, K), in (-1, 1)

    @property
    def weights(self) -> Tensor:
        return self.log_weights.exp()

    def expected_value(self) -> Tensor:
        """(B, T, 2) mixture mean."""
        k = self.log_weights.shape[-1]
        w = self.weights.reshape(*self.log_weights.shape, 1)
        return (w * self.mean).sum(axis=-2)


@dataclass
class GeneratorOutput:
    context: Tensor  # (B, T, d_model) layout-aware representation
    position_head: MixtureHead
    size_head: MixtureHead

    def expected_boxes(self) -> Tensor:
        """(B, T, 4) differentiable box estimates (standardized space)."""
        return concat([self.position_head.expected_value(), self.size_head.expected_value()], axis=-1)


class Predictor(Module):
    """Encodes the five token streams into contextual features and box hints."""

    def __init__(self, rng: np.random.Generator, cfg: ModelConfig):
        d_e = cfg.d_model // 4
        self.word_emb = Embedding(rng, cfg.word_vocab, d_e)
        self.object_emb = Embedding(rng, cfg.object_vocab, d_e)
        self.relation_emb = Embedding(rng, cfg.relationship_vocab, d_e)
        self.type_emb = Embedding(rng, cfg.type_vocab, d_e)
        self.parent_emb = Embedding(rng, cfg.parent_vocab, d_e)
        self.in_proj = Linear(rng, 5 * d_e, cfg.d_model)
        self.layers = [
            EncoderLayer(rng, cfg.d_model, cfg.n_heads, cfg.ffn_dim, cfg.dropout_rate)
            for _ in range(cfg.n_encoder_layers)
        ]
        self.out_norm = LayerNorm(cfg.d_model)
        self.size_head = Linear(rng, cfg.d_model, 2)
        self.position_head = Linear(rng, cfg.d_model, 2)
        self.recon_word = Linear(rng, cfg.d_model, cfg.word_vocab)
        self.recon_object = Linear(rng, cfg.d_model, cfg.object_vocab)
        self.recon_type = Linear(rng, cfg.d_model, cfg.type_vocab)
        self.recon_parent = Linear(rng, cfg.d_model, cfg.parent_vocab)

    def __call__(
        self,
        word: np.ndarray,
        object_ids: np.ndarray,
        relation: np.ndarray,
        type_ids: np.ndarray,
        parent: np.ndarray,
        attn_bias: np.ndarray | None,
        rng: np.random.Generator | None = None,
    ) -> PredictorOutput:
        e = concat(
            [
                self.word_emb(word),
                self.object_emb(object_ids),
                self.relation_emb(relation),
                self.type_emb(type_ids),
                self.parent_emb(parent),
            ],
            axis=-1,
        )
        x = self.in_proj(e)
        for layer in self.layers:
            x = layer(x, attn_bias, rng)
        f = self.out_norm(x)
        return PredictorOutput(
            features=f,
            sizes=self.size_head(f),
            positions=self.position_head(f),
            recon={
                "word": self.recon_word(f),
                "object": self.recon_object(f),
                "type": self.recon_type(f),
                "parent": self.recon_parent(f),
            },
        )


class Generator(Module):
    """Autoregressive decoder emitting a bivariate mixture per step and head."""

    def __init__(self, rng: np.random.Generator, cfg: ModelConfig):
        self.cfg = cfg
        self.in_proj = Linear(rng, cfg.d_model + 8, cfg.d_model)
        self.layers = [
            DecoderLayer(rng, cfg.d_model, cfg.n_heads, cfg.ffn_dim, cfg.dropout_rate)
            for _ in range(cfg.n_decoder_layers)
        ]
        self.out_norm = LayerNorm(cfg.d_model)
        self.mixture_head = Linear(rng, cfg.d_model, 12 * cfg.n_mixtures)
        self._pos_table = sinusoid_encoding(cfg.max_seq_len, cfg.d_model)

    def __call__(
        self,
        features: Tensor,
        sizes: Tensor,
        positions: Tensor,
        prev_boxes: np.ndarray | Tensor,
        cross_bias: np.ndarray | None,
        rng: np.random.Generator | None = None,
    ) -> GeneratorOutput:
        prev = prev_boxes if isinstance(prev_boxes, Tensor) else Tensor(prev_boxes)
        t_len = features.shape[1]
        x = self.in_proj(concat([features, positions, sizes, prev], axis=-1))
        x = x + self._pos_table[None, :t_len, :]
        self_mask = causal_mask(t_len)
        for layer in self.layers:
            x = layer(x, features, self_mask, cross_bias, rng)
        c = self.out_norm(x)
        raw = self.mixture_head(c)
        b, t, _ = raw.shape
        k = self.cfg.n_mixtures
        grouped = raw.reshape(b, t, 2, 6, k)
        heads = []
        for h in range(2):
            head_raw = grouped[:, :, h]
            heads.append(
                MixtureHead(
                    log_weights=log_softmax(head_raw[:, :, 0], axis=-1),
                    mean=_stack_pair(head_raw[:, :, 1], head_raw[:, :, 2]),
                    sigma=_stack_pair(head_raw[:, :, 3].exp(), head_raw[:, :, 4].exp()),
                    corr=head_raw[:, :, 5].tanh(),
                )
            )
        return GeneratorOutput(context=c, position_head=heads[0], size_head=heads[1])


def _stack_pair(a: Tensor, b: Tensor) -> Tensor:
    ba, ta, ka = a.shape
    return concat([a.reshape(ba, ta, ka, 1), b.reshape(ba, ta, ka, 1)], axis=-1)


class Refiner(Module):
    """Co-attention between semantics and boxes predicting residual corrections."""

    def __init__(self, rng: np.random.Generator, cfg: ModelConfig):
        self.box_proj = Linear(rng, 4, cfg.d_model)
        self.sem_attends_box = MultiHeadAttention(rng, cfg.d_model, cfg.n_heads)
        self.box_attends_sem = MultiHeadAttention(rng, cfg.d_model, cfg.n_heads)
        self.norm_sem = LayerNorm(cfg.d_model)
        self.norm_box = LayerNorm(cfg.d_model)
        self.fuse_up = Linear(rng, 2 * cfg.d_model, cfg.ffn_dim)
        self.fuse_down = Linear(rng, cfg.ffn_dim, cfg.d_model)
        # Zero init keeps refinement an exact identity before training.
        self.delta_head = Linear(rng, cfg.d_model, 4, zero_init=True)
        self.drop = Dropout(cfg.dropout_rate)

    def __call__(
        self,
        context: Tensor,
        boxes: Tensor,
        attn_bias: np.ndarray | None,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        box_e = self.box_proj(boxes)
        sem = self.norm_sem(context + self.drop(self.sem_attends_box(context, box_e, box_e, attn_bias), rng))
        box = self.norm_box(box_e + self.drop(self.box_attends_sem(box_e, context, context, attn_bias), rng))
        fused = self.fuse_down(self.fuse_up(concat([sem, box], axis=-1)).relu())
        return boxes + self.delta_head(fused)


class GuilgetModel(Module):
    """Bundle of the three stages with deterministic initialization."""

    def __init__(self, cfg: ModelConfig, seed: int = 0):
        self.cfg = cfg
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        self.predictor = Predictor(rng, cfg)
        self.generator = Generator(rng, cfg)
        self.refiner = Refiner(rng, cfg)

    def save(self, path: str | Path) -> None:
        tensors = {name: t.data for name, t in self.parameters().items()}
        save_checkpoint(path, self.cfg.to_dict(), tensors)

    @classmethod
    def load(cls, path: str | Path) -> "GuilgetModel":
        config_doc, tensors = load_checkpoint(path)
        model = cls(ModelConfig.from_dict(config_doc))
        params = model.parameters()
        missing = set(params) - set(tensors)
        extra = set(tensors) - set(params)
        if missing or extra:
            raise ValueError(f"checkpoint tensor mismatch: missing={missing}, extra={extra}")
        for name, param in params.items():
            if param.data.shape != tensors[name].shape:
                raise ValueError(
                    f"checkpoint shape mismatch for {name}: "
                    f"{tensors[name].shape} vs {param.data.shape}"
                )
            param.data = tensors[name].copy()
        return model
