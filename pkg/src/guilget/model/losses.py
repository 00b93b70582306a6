"""Training objectives for the three stages.

All losses are scalars built from the autodiff tensor core so one backward
pass trains the whole pipeline jointly. Geometric penalties (overlap,
containment) are computed in screen space on differentiable box estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from guilget.model.batching import Batch
from guilget.model.config import LossWeights
from guilget.model.stages import GeneratorOutput, MixtureHead, PredictorOutput
from guilget.nn.tensor import (
    Tensor,
    log_softmax,
    logsumexp,
    maximum,
    minimum,
    segment_sum,
    select_last,
    take,
    where,
)

_AREA_EPS = 1e-6


@dataclass
class LossReport:
    pred: float
    box: float
    kl: float
    rel: float
    reg: float
    cc: float
    cp: float
    total: float

    def as_dict(self) -> dict[str, float]:
        return {
            "pred": self.pred,
            "box": self.box,
            "kl": self.kl,
            "rel": self.rel,
            "reg": self.reg,
            "cc": self.cc,
            "cp": self.cp,
            "total": self.total,
        }


def smooth_l1(diff: Tensor) -> Tensor:
    """Elementwise smooth L1 (quadratic inside the unit band)."""
    mag = diff.abs()
    return where(mag.data < 1.0, 0.5 * diff * diff, mag - 0.5)


def masked_mean(values: Tensor, mask: np.ndarray) -> Tensor:
    """Mean of per-step values over the positions where mask is 1."""
    count = float(mask.sum())
    if count == 0.0:
        return Tensor(0.0)
    return (values * mask).sum() / count


def cross_entropy(logits: Tensor, targets: np.ndarray) -> Tensor:
    """Per-position cross entropy along the last axis."""
    return -select_last(log_softmax(logits, axis=-1), targets)


def masked_token_selection(
    maskable: np.ndarray, mask_rate: float, rng: np.random.Generator
) -> np.ndarray:
    """Pick round(rate * n) maskable positions per row, without replacement."""
    chosen = np.zeros_like(maskable, dtype=bool)
    for i in range(maskable.shape[0]):
        candidates = np.flatnonzero(maskable[i])
        n = int(round(mask_rate * candidates.size))
        if n > 0:
            chosen[i, rng.choice(candidates, size=n, replace=False)] = True
    return chosen


def predictor_loss(
    out: PredictorOutput,
    batch: Batch,
    masked: np.ndarray,
) -> tuple[Tensor, Tensor]:
    """(semantic reconstruction, box regression) for the predictor stage."""
    weights = masked.astype(np.float64)
    n_masked = float(weights.sum())
    if n_masked > 0:
        sem_terms = [
            cross_entropy(out.recon["word"], batch.word),
            cross_entropy(out.recon["object"], batch.object_ids),
            cross_entropy(out.recon["type"], batch.type_ids),
            cross_entropy(out.recon["parent"], batch.parent),
        ]
        sem = sum(((t * weights).sum() for t in sem_terms), Tensor(0.0)) / (4.0 * n_masked)
    else:
        sem = Tensor(0.0)

    pos_err = smooth_l1(out.positions - batch.target_std[:, :, :2]).sum(axis=-1)
    size_err = smooth_l1(out.sizes - batch.target_std[:, :, 2:]).sum(axis=-1)
    box = masked_mean(pos_err, batch.pos_mask) + masked_mean(size_err, batch.size_mask)
    return sem, box


def _bivariate_log_density(head: MixtureHead, target: np.ndarray) -> Tensor:
    """(B, T, K) log density of the target pair under each component."""
    tgt = target[:, :, None, :]  # broadcast over mixture components
    dx = (Tensor(tgt[..., 0]) - head.mean[..., 0]) / head.sigma[..., 0]
    dy = (Tensor(tgt[..., 1]) - head.mean[..., 1]) / head.sigma[..., 1]
    one_minus_r2 = 1.0 - head.corr * head.corr
    quad = (dx * dx + dy * dy - 2.0 * head.corr * dx * dy) / one_minus_r2
    log_norm = (
        math.log(2.0 * math.pi)
        + head.sigma[..., 0].log()
        + head.sigma[..., 1].log()
        + 0.5 * one_minus_r2.log()
    )
    return -0.5 * quad - log_norm


def mixture_nll(head: MixtureHead, target: np.ndarray) -> Tensor:
    """(B, T) box reconstruction NLL, scaled by 1/K."""
    k = head.log_weights.shape[-1]
    log_mix = logsumexp(head.log_weights + _bivariate_log_density(head, target), axis=-1)
    return -log_mix / float(k)


def mixture_kl_to_standard(head: MixtureHead) -> Tensor:
    """(B, T) weight-averaged closed-form KL of each component to N(0, I)."""
    sx = head.sigma[..., 0]
    sy = head.sigma[..., 1]
    mu2 = (head.mean * head.mean).sum(axis=-1)
    log_det = (sx * sx).log() + (sy * sy).log() + (1.0 - head.corr * head.corr).log()
    kl_k = 0.5 * (sx * sx + sy * sy + mu2 - 2.0 - log_det)
    return (head.weights * kl_k).sum(axis=-1)


def generator_losses(
    gen: GeneratorOutput, batch: Batch
) -> tuple[Tensor, Tensor, Tensor]:
    """(box NLL, KL to prior, relation consistency) for the generator."""
    n_steps = float(batch.pos_mask.sum())
    nll = (
        mixture_nll(gen.position_head, batch.target_std[:, :, :2]) * batch.pos_mask
        + mixture_nll(gen.size_head, batch.target_std[:, :, 2:]) * batch.size_mask
    )
    kl = (
        mixture_kl_to_standard(gen.position_head) * batch.pos_mask
        + mixture_kl_to_standard(gen.size_head) * batch.size_mask
    )
    box = nll.sum() / n_steps if n_steps else Tensor(0.0)
    kl_total = kl.sum() / n_steps if n_steps else Tensor(0.0)
    rel = relation_consistency(gen.expected_boxes(), batch.spans, batch.seq_len)
    return box, kl_total, rel


def relation_consistency(boxes: Tensor, spans: np.ndarray, seq_len: int) -> Tensor:
    """MSE between each predicate's box and its neighbors' position disparity.

    `boxes` is (B, T, 4); `spans` rows are (batch, subject, predicate,
    object) token indices. Squared errors are summed over x and y and
    averaged over triplets.
    """
    if spans.shape[0] == 0:
        return Tensor(0.0)
    flat = boxes.reshape(boxes.shape[0] * boxes.shape[1], 4)
    base = spans[:, 0] * seq_len
    sub = take(flat, base + spans[:, 1])[:, :2]
    pred = take(flat, base + spans[:, 2])[:, :2]
    obj = take(flat, base + spans[:, 3])[:, :2]
    err = (obj - sub) - pred
    return (err * err).sum() / float(spans.shape[0])


def _component_boxes(refined_screen: Tensor, batch: Batch) -> Tensor:
    """(N_comp, 4) screen-space box per component, averaged over occurrences."""
    flat = refined_screen.reshape(batch.size * batch.seq_len, 4)
    sums = segment_sum(take(flat, batch.occ_rows), batch.occ_comp, batch.n_components)
    return sums / batch.comp_counts[:, None].astype(np.float64)


def _pair_intersection(a: Tensor, b: Tensor) -> Tensor:
    """(N,) overlap area between two stacks of (x, y, w, h) boxes."""
    ix = minimum(a[:, 0] + a[:, 2], b[:, 0] + b[:, 2]) - maximum(a[:, 0], b[:, 0])
    iy = minimum(a[:, 1] + a[:, 3], b[:, 1] + b[:, 3]) - maximum(a[:, 1], b[:, 1])
    return ix.relu() * iy.relu()


def _box_area(boxes: Tensor) -> Tensor:
    return boxes[:, 2].relu() * boxes[:, 3].relu()


def refiner_losses(
    refined_std: Tensor, batch: Batch
) -> tuple[Tensor, Tensor, Tensor]:
    """(regression, sibling overlap, child containment) for the refiner."""
    pos_err = smooth_l1(refined_std[:, :, :2] - batch.target_std[:, :, :2]).sum(axis=-1)
    size_err = smooth_l1(refined_std[:, :, 2:] - batch.target_std[:, :, 2:]).sum(axis=-1)
    reg = masked_mean(pos_err, batch.pos_mask) + masked_mean(size_err, batch.size_mask)

    screen = refined_std / 2.0 + 0.5
    comp = _component_boxes(screen, batch)

    if batch.sibling_pairs.shape[0]:
        first = take(comp, batch.sibling_pairs[:, 0])
        second = take(comp, batch.sibling_pairs[:, 1])
        smaller = minimum(_box_area(first), _box_area(second))
        overlap = _pair_intersection(first, second) / maximum(smaller, _AREA_EPS)
        cc = overlap.mean()
    else:
        cc = Tensor(0.0)

    if batch.child_parent_pairs.shape[0]:
        child = take(comp, batch.child_parent_pairs[:, 0])
        parent = take(comp, batch.child_parent_pairs[:, 1])
        contained = _pair_intersection(child, parent) / maximum(_box_area(child), _AREA_EPS)
        cp = (1.0 - contained).mean()
    else:
        cp = Tensor(0.0)
    return reg, cc, cp


def combine(
    sem: Tensor,
    pred_box: Tensor,
    box: Tensor,
    kl: Tensor,
    rel: Tensor,
    reg: Tensor,
    cc: Tensor,
    cp: Tensor,
    weights: LossWeights,
) -> tuple[Tensor, LossReport]:
    """Weighted joint objective plus a float report of every component."""
    pred = sem + pred_box
    total = (
        pred
        + weights.box * box
        + weights.kl * kl
        + weights.rel * rel
        + weights.reg * reg
        + weights.cc * cc
        + weights.cp * cp
    )
    report = LossReport(
        pred=pred.item(),
        box=box.item(),
        kl=kl.item(),
        rel=rel.item(),
        reg=reg.item(),
        cc=cc.item(),
        cp=cp.item(),
        total=total.item(),
    )
    return total, report


def gmm_nll(
    weights: np.ndarray,
    means: np.ndarray,
    sigmas: np.ndarray,
    corrs: np.ndarray,
    point: tuple[float, float],
) -> float:
    """Mixture NLL of a single coordinate pair under one mixture head."""
    k = len(weights)
    head = MixtureHead(
        log_weights=Tensor(np.log(np.asarray(weights))).reshape(1, 1, k),
        mean=Tensor(np.asarray(means)).reshape(1, 1, k, 2),
        sigma=Tensor(np.asarray(sigmas)).reshape(1, 1, k, 2),
        corr=Tensor(np.asarray(corrs)).reshape(1, 1, k),
    )
    target = np.asarray(point, dtype=np.float64).reshape(1, 1, 2)
    return mixture_nll(head, target).item()


def kl_to_prior(
    weights: np.ndarray,
    means: np.ndarray,
    sigmas: np.ndarray,
    corrs: np.ndarray,
) -> float:
    """Weight-averaged KL of one mixture head to the standard bivariate normal."""
    k = len(weights)
    head = MixtureHead(
        log_weights=Tensor(np.log(np.asarray(weights))).reshape(1, 1, k),
        mean=Tensor(np.asarray(means)).reshape(1, 1, k, 2),
        sigma=Tensor(np.asarray(sigmas)).reshape(1, 1, k, 2),
        corr=Tensor(np.asarray(corrs)).reshape(1, 1, k),
    )
    return mixture_kl_to_standard(head).item()
