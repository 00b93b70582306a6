"""Joint training loop over the three stages."""

from __future__ import annotations

import numpy as np

from guilget.model.batching import Batch
from guilget.model.config import LossWeights, TrainConfig
from guilget.model.losses import (
    LossReport,
    combine,
    generator_losses,
    masked_token_selection,
    predictor_loss,
    refiner_losses,
)
from guilget.model.stages import GuilgetModel
from guilget.nn.optim import Adam, clip_grad_norm
from guilget.tokens import MASK


def train_step(
    model: GuilgetModel,
    batch: Batch,
    weights: LossWeights,
    optimizer: Adam,
    rng: np.random.Generator,
    grad_clip: float = 5.0,
) -> LossReport:
    """One Adam update of the joint objective; returns every loss component."""
    optimizer.zero_grad()
    masked = masked_token_selection(batch.maskable, model.cfg.mask_rate, rng)
    word_in = np.where(masked, MASK, batch.word)

    out = model.predictor(
        word_in,
        batch.object_ids,
        batch.relation,
        batch.type_ids,
        batch.parent,
        batch.attn_bias,
        rng=rng,
    )
    gen = model.generator(
        out.features, out.sizes, out.positions, batch.prev_std, batch.attn_bias, rng=rng
    )
    refined = model.refiner(gen.context, gen.expected_boxes(), batch.attn_bias, rng=rng)

    sem, pred_box = predictor_loss(out, batch, masked)
    box, kl, rel = generator_losses(gen, batch)
    reg, cc, cp = refiner_losses(refined, batch)
    total, report = combine(sem, pred_box, box, kl, rel, reg, cc, cp, weights)

    total.backward()
    clip_grad_norm(optimizer.params, grad_clip)
    optimizer.step()
    return report


def train(
    model: GuilgetModel,
    batches: list[Batch],
    config: TrainConfig,
    log=None,
) -> list[dict[str, float]]:
    """Run `config.steps` updates cycling over the batches; returns history."""
    if not batches:
        raise ValueError("no training batches")
    optimizer = Adam(model.parameters(), lr=config.lr)
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 1]))
    order = np.arange(len(batches))
    history: list[dict[str, float]] = []
    for step in range(config.steps):
        if step % len(batches) == 0:
            order = rng.permutation(len(batches))
        batch = batches[order[step % len(batches)]]
        report = train_step(model, batch, config.weights, optimizer, rng, config.grad_clip)
        row = {"step": float(step)} | report.as_dict()
        history.append(row)
        if log is not None and (step % config.log_every == 0 or step == config.steps - 1):
            log(
                f"step {step:5d}  total {report.total:8.4f}  pred {report.pred:7.4f}  "
                f"box {report.box:7.4f}  kl {report.kl:6.3f}  rel {report.rel:6.4f}  "
                f"reg {report.reg:6.4f}  cc {report.cc:5.3f}  cp {report.cp:5.3f}"
            )
    return history
