"""Model, loss-weight, and training configuration."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from guilget.tokens import TYPE_VOCAB, WORD_VOCAB


@dataclass
class ModelConfig:
    d_model: int = 64
    n_heads: int = 2
    n_encoder_layers: int = 2
    n_decoder_layers: int = 2
    ffn_dim: int = 128
    n_mixtures: int = 5
    word_vocab: int = WORD_VOCAB
    object_vocab: int = 64
    relationship_vocab: int = 41
    type_vocab: int = TYPE_VOCAB
    parent_vocab: int = 64
    max_seq_len: int = 160
    dropout_rate: float = 0.1
    mask_rate: float = 0.15

    def __post_init__(self) -> None:
        if self.d_model % self.n_heads != 0:
            raise ValueError("d_model must be divisible by n_heads")
        if self.n_mixtures < 1:
            raise ValueError("need at least one mixture component")
        if self.relationship_vocab < self.max_seq_len // 4 + 1:
            raise ValueError("relationship vocab too small for max_seq_len")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "ModelConfig":
        return cls(**doc)


@dataclass
class LossWeights:
    """Weights for the generator and refiner loss terms.

    The containment weight is deliberately the largest: child-in-parent
    placement is the slowest constraint to emerge in training.
    """

    box: float = 1.0
    kl: float = 0.1
    rel: float = 1.0
    reg: float = 1.0
    cc: float = 0.5
    cp: float = 1.5

    def __post_init__(self) -> None:
        if any(v < 0 for v in asdict(self).values()):
            raise ValueError("loss weights must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "LossWeights":
        return cls(**doc)


@dataclass
class TrainConfig:
    """Everything a training run needs, loadable from a JSON file."""

    model: ModelConfig = field(default_factory=ModelConfig)
    weights: LossWeights = field(default_factory=LossWeights)
    steps: int = 500
    batch_size: int = 16
    lr: float = 1e-3
    grad_clip: float = 5.0
    seed: int = 0
    log_every: int = 25
    data_dir: str | None = None
    synth_count: int | None = None
    synth_seed: int = 0
    synth_grammar: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "model": self.model.to_dict(),
            "loss_weights": self.weights.to_dict(),
            "train": {
                "steps": self.steps,
                "batch_size": self.batch_size,
                "lr": self.lr,
                "grad_clip": self.grad_clip,
                "seed": self.seed,
                "log_every": self.log_every,
            },
        }
        if self.data_dir is not None:
            out["data"] = {"dir": self.data_dir}
        else:
            synth: dict = {"count": self.synth_count, "seed": self.synth_seed}
            if self.synth_grammar:
                synth["grammar"] = dict(self.synth_grammar)
            out["data"] = {"synth": synth}
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "TrainConfig":
        train = doc.get("train", {})
        data = doc.get("data", {})
        synth = data.get("synth") or {}
        return cls(
            model=ModelConfig.from_dict(doc.get("model", {})),
            weights=LossWeights.from_dict(doc.get("loss_weights", {})),
            steps=int(train.get("steps", 500)),
            batch_size=int(train.get("batch_size", 16)),
            lr=float(train.get("lr", 1e-3)),
            grad_clip=float(train.get("grad_clip", 5.0)),
            seed=int(train.get("seed", 0)),
            log_every=int(train.get("log_every", 25)),
            data_dir=data.get("dir"),
            synth_count=synth.get("count"),
            synth_seed=int(synth.get("seed", 0)),
            synth_grammar=dict(synth.get("grammar") or {}),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "TrainConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))
