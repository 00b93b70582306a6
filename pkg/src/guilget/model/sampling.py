"""Sampling boxes from mixture heads and end-to-end layout generation."""

from __future__ import annotations

import numpy as np

from guilget.geometry import BBox
from guilget.graph import GuiAG
from guilget.model.batching import destandardize
from guilget.model.stages import GeneratorOutput, GuilgetModel
from guilget.nn.layers import padding_bias
from guilget.nn.tensor import Tensor, no_grad
from guilget.tokens import TYPE_OBJECT, TYPE_PREDICATE, TYPE_SUBJECT, serialize_ag


def sample_head(
    weights: np.ndarray,
    means: np.ndarray,
    sigmas: np.ndarray,
    corrs: np.ndarray,
    temperature: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw one correlated coordinate pair from a bivariate mixture head.

    Temperature sharpens the component choice (weights ** (1/T)) and
    scales the standard deviations; temperature 0 returns the mean of the
    most likely component.
    """
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    weights = np.asarray(weights, dtype=np.float64)
    if temperature == 0.0:
        k = int(np.argmax(weights))
        return np.asarray(means[k], dtype=np.float64).copy()
    logits = np.log(weights) / temperature
    sharp = np.exp(logits - logits.max())
    sharp /= sharp.sum()
    k = int(rng.choice(len(weights), p=sharp))
    sx, sy = sigmas[k] * temperature
    rho = corrs[k]
    z1, z2 = rng.standard_normal(2)
    x = means[k][0] + sx * z1
    y = means[k][1] + sy * (rho * z1 + np.sqrt(1.0 - rho * rho) * z2)
    return np.array([x, y])


def sample_bbox(
    position_head: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray],
    size_head: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray],
    temperature: float,
    rng: np.random.Generator,
) -> BBox:
    """Sample a screen-space box from one step's two mixture heads."""
    pos = destandardize(sample_head(*position_head, temperature, rng))
    size = destandardize(sample_head(*size_head, temperature, rng))
    return BBox(pos[0], pos[1], max(size[0], 0.0), max(size[1], 0.0))


def _head_at(head, t: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    return (
        np.exp(head.log_weights.data[0, t]),
        head.mean.data[0, t],
        head.sigma.data[0, t],
        head.corr.data[0, t],
    )


def generate_layout(
    model: GuilgetModel,
    ag: GuiAG,
    n_samples: int = 1,
    temperature: float = 0.0,
    seed: int = 0,
) -> list[dict[int, BBox]]:
    """Generate layouts for a graph: one box per component instance.

    Tokens are decoded autoregressively, sampled boxes feed the next step,
    the refiner adjusts the full sequence, and each component's box is the
    average of its refined occurrences clamped to the screen.
    """
    tokens = serialize_ag(ag, model.cfg.max_seq_len, model.cfg.object_vocab)
    t_len = len(tokens)
    word = tokens.word_ids[None, :]
    obj = tokens.object_ids[None, :]
    rel = tokens.relationship_ids[None, :]
    typ = tokens.type_ids[None, :]
    par = tokens.parent_ids[None, :]
    bias = padding_bias(np.ones((1, t_len), dtype=bool))
    streams = np.random.SeedSequence(seed).spawn(n_samples)

    layouts: list[dict[int, BBox]] = []
    with no_grad():
        out = model.predictor(word, obj, rel, typ, par, bias)
        for sample_idx in range(n_samples):
            rng = np.random.default_rng(streams[sample_idx])
            boxes_std = np.zeros((t_len, 4))
            prev = np.zeros((1, t_len, 4))
            gen: GeneratorOutput | None = None
            for t in range(t_len):
                if t > 0:
                    prev[0, t] = boxes_std[t - 1]
                gen = model.generator(out.features, out.sizes, out.positions, prev, bias)
                role = int(typ[0, t])
                if role in (TYPE_SUBJECT, TYPE_OBJECT):
                    boxes_std[t, :2] = sample_head(*_head_at(gen.position_head, t), temperature, rng)
                    boxes_std[t, 2:] = sample_head(*_head_at(gen.size_head, t), temperature, rng)
                elif role == TYPE_PREDICATE:
                    boxes_std[t, :2] = sample_head(*_head_at(gen.position_head, t), temperature, rng)
            assert gen is not None
            refined = model.refiner(gen.context, Tensor(boxes_std[None]), bias).data[0]
            layouts.append(_collect_boxes(refined, tokens.step_instance))
    return layouts


def _collect_boxes(refined_std: np.ndarray, step_instance: np.ndarray) -> dict[int, BBox]:
    screen = destandardize(refined_std)
    sums: dict[int, np.ndarray] = {}
    counts: dict[int, int] = {}
    for t, inst in enumerate(step_instance):
        inst = int(inst)
        if inst < 0:
            continue
        if inst not in sums:
            sums[inst] = np.zeros(4)
            counts[inst] = 0
        sums[inst] += screen[t]
        counts[inst] += 1
    result: dict[int, BBox] = {}
    for inst, total in sums.items():
        x, y, w, h = total / counts[inst]
        x = min(max(x, 0.0), 1.0)
        y = min(max(y, 0.0), 1.0)
        w = min(max(w, 0.0), 1.0 - x)
        h = min(max(h, 0.0), 1.0 - y)
        result[inst] = BBox(x, y, w, h)
    return result
