"""Adam optimizer and a finite-difference gradient checker."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from guilget.nn.tensor import Tensor


class Adam:
    """Standard Adam over a named parameter dict; updates in place."""

    def __init__(
        self,
        params: dict[str, Tensor],
        lr: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros_like(p.data) for k, p in params.items()}
        self.v = {k: np.zeros_like(p.data) for k, p in params.items()}

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.grad = None

    def step(self) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        bias1 = 1.0 - b1**self.t
        bias2 = 1.0 - b2**self.t
        for key, p in self.params.items():
            if p.grad is None:
                continue
            m = self.m[key]
            v = self.v[key]
            m *= b1
            m += (1.0 - b1) * p.grad
            v *= b2
            v += (1.0 - b2) * (p.grad * p.grad)
            p.data -= self.lr * (m / bias1) / (np.sqrt(v / bias2) + self.eps)


def clip_grad_norm(params: dict[str, Tensor], max_norm: float) -> float:
    """Scale all gradients so their global L2 norm is at most max_norm."""
    total = 0.0
    for p in params.values():
        if p.grad is not None:
            total += float((p.grad * p.grad).sum())
    norm = float(np.sqrt(total))
    if norm > max_norm > 0.0:
        scale = max_norm / norm
        for p in params.values():
            if p.grad is not None:
                p.grad *= scale
    return norm


@dataclass
class GradCheckReport:
    tol: float
    max_error: float
    per_param: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tol


def grad_check(
    loss_fn: Callable[[], Tensor],
    params: dict[str, Tensor],
    tol: float = 1e-3,
    samples_per_param: int = 4,
    step: float = 1e-5,
    seed: int = 0,
) -> GradCheckReport:
    """Compare reverse-mode gradients against central finite differences.

    `loss_fn` must rebuild the forward pass from the live parameter values
    each call. A few entries are probed per parameter tensor; the reported
    error is |ad - fd| / max(1, |ad|, |fd|), so tiny gradients are judged
    on an absolute scale.
    """
    rng = np.random.default_rng(seed)
    for p in params.values():
        p.grad = None
    loss_fn().backward()
    report = GradCheckReport(tol=tol, max_error=0.0)
    for name, p in params.items():
        grad = p.grad if p.grad is not None else np.zeros_like(p.data)
        flat = p.data.reshape(-1)
        n = min(samples_per_param, flat.size)
        idx = rng.choice(flat.size, size=n, replace=False)
        worst = 0.0
        for i in idx:
            saved = flat[i]
            flat[i] = saved + step
            up = loss_fn().item()
            flat[i] = saved - step
            down = loss_fn().item()
            flat[i] = saved
            fd = (up - down) / (2.0 * step)
            ad = float(grad.reshape(-1)[i])
            err = abs(ad - fd) / max(1.0, abs(ad), abs(fd))
            worst = max(worst, err)
        report.per_param[name] = worst
        report.max_error = max(report.max_error, worst)
    return report
