"""Squared-error fitting on selected actions and finite-difference checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .network import QNet, SeqBatch


def mse_loss_grad(net: QNet, batch: SeqBatch, actions, targets):
    """Loss ``mean((y - Q[a])^2)`` and its parameter gradients."""
    actions = np.asarray(actions, dtype=np.int64)
    targets = np.asarray(targets, dtype=float)
    Q, cache = net.forward(batch)
    rows = np.arange(len(actions))
    diff = Q[rows, actions] - targets
    loss = float(np.mean(diff * diff))
    dQ = np.zeros_like(Q)
    dQ[rows, actions] = 2.0 * diff / len(actions)
    return loss, net.backward(cache, dQ)


def mse_fit(net: QNet, opt, batch: SeqBatch, actions, targets) -> float:
    """One optimiser step on the selected-action squared error; returns the
    loss measured before the step."""
    if len(actions) == 0:
        raise ValueError("empty batch")
    loss, grads = mse_loss_grad(net, batch, actions, targets)
    opt.step(net.params, grads)
    return loss


@dataclass
class GradReport:
    max_rel_error: float
    per_param: dict[str, float] = field(default_factory=dict)
    tol: float = 1e-4

    @property
    def passed(self) -> bool:
        return self.max_rel_error < self.tol

    @property
    def worst(self) -> str:
        return max(self.per_param, key=self.per_param.get) if self.per_param else ""

    def __str__(self) -> str:
        status = "pass" if self.passed else f"FAIL (worst parameter: {self.worst})"
        return f"max relative error {self.max_rel_error:.3e} vs tol {self.tol:g}: {status}"


def grad_check(
    net: QNet,
    batch: SeqBatch,
    actions,
    targets,
    tol: float = 1e-4,
    h: float = 1e-5,
    grad_fn: Callable | None = None,
    floor: float = 1e-8,
) -> GradReport:
    """Compare analytic gradients (``grad_fn`` or :func:`mse_loss_grad`) with
    central differences for every parameter array.  The relative error of an
    array is ``max|a - n| / max(max|a|, max|n|, floor)``; entry-wise ratios
    are dominated by rounding for entries near zero."""
    grad_fn = grad_fn or mse_loss_grad
    _, grads = grad_fn(net, batch, actions, targets)
    report = GradReport(0.0, {}, tol)
    for name, theta in net.params.items():
        g = grads[name]
        num = np.zeros_like(theta)
        for i in np.ndindex(theta.shape):
            old = theta[i]
            theta[i] = old + h
            lp, _ = mse_loss_grad(net, batch, actions, targets)
            theta[i] = old - h
            lm, _ = mse_loss_grad(net, batch, actions, targets)
            theta[i] = old
            num[i] = (lp - lm) / (2 * h)
        scale = max(float(np.max(np.abs(g), initial=0.0)), float(np.max(np.abs(num), initial=0.0)), floor)
        worst = float(np.max(np.abs(g - num), initial=0.0)) / scale
        report.per_param[name] = worst
        report.max_rel_error = max(report.max_rel_error, worst)
    return report


def random_check_case(seed: int, max_hidden: int = 16, max_len: int = 6):
    """A seeded small recurrent net with a random batch, for gradient checks.

    Biases are perturbed away from their zero init.  Sequences mix single tokens and multi-hot tuples and have ragged lengths.
    Returns ``(net, batch, actions, targets)``.
    """
    from .network import RecurrentQNet, make_batch

    gen = np.random.default_rng(seed)
    n_obs, n_task, n_act = (int(v) for v in gen.integers(2, 7, size=3))
    net = RecurrentQNet(
        n_obs, n_task, n_act,
        obs_hidden=int(gen.integers(2, max_hidden + 1)),
        task_hidden=int(gen.integers(2, max_hidden + 1)),
        dense=int(gen.integers(2, 9)),
        rng=gen,
    )

    # move biases off their zero init: a dead ReLU unit with zero bias sits
    # exactly on the kink, where central differences are meaningless
    for name, theta in net.params.items():
        if name.endswith(".b"):
            theta += gen.normal(scale=0.1, size=theta.shape)

    def seq(vocab):
        out = []
        for _ in range(int(gen.integers(1, max_len + 1))):
            if gen.random() < 0.2:
                out.append(tuple(sorted(set(int(v) for v in gen.integers(vocab, size=2)))))
            else:
                out.append(int(gen.integers(vocab)))
        return out

    B = int(gen.integers(1, 5))
    batch = make_batch([seq(n_obs) for _ in range(B)], [seq(n_task) for _ in range(B)])
    actions = [int(a) for a in gen.integers(n_act, size=B)]
    targets = gen.normal(size=B) * 3.0
    return net, batch, actions, targets
