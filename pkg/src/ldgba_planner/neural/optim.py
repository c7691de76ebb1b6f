"""Gradient-descent optimisers acting in place on a parameter dict."""
from __future__ import annotations

import numpy as np


class Sgd:
    name = "sgd"

    def __init__(self, lr: float = 1e-3, clip: float | None = None):
        self.lr = lr
        self.clip = clip

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        scale = _clip_scale(grads, self.clip)
        for k, g in grads.items():
            params[k] -= self.lr * scale * g


class Adam:
    name = "adam"

    def __init__(self, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8, clip: float | None = None):
        self.lr, self.beta1, self.beta2, self.eps, self.clip = lr, beta1, beta2, eps, clip
        self.t = 0
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}

    def step(self, params, grads) -> None:
        self.t += 1
        scale = _clip_scale(grads, self.clip)
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for k, g in grads.items():
            g = g * scale
            if k not in self.m:
                self.m[k] = np.zeros_like(g)
                self.v[k] = np.zeros_like(g)
            m, v = self.m[k], self.v[k]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            params[k] -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def _clip_scale(grads, clip):
    if clip is None:
        return 1.0
    norm = np.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    return 1.0 if norm <= clip else clip / norm


def make_optimizer(name: str, lr: float, clip: float | None = None):
    if name == "sgd":
        return Sgd(lr, clip)
    if name == "adam":
        return Adam(lr, clip=clip)
    raise ValueError(f"unknown optimizer {name!r}")
