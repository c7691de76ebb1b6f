"""Q-networks over index-encoded observation and task sequences.

A sequence is a list of tokens; a token is an int (one-hot) or a tuple of
ints (multi-hot, used when two task streams are concatenated).  Batches
are padded index tensors, see :func:`encode`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .kernels import lstm_backward, lstm_forward

Token = int | tuple[int, ...]


class ShapeError(ValueError):
    pass


@dataclass
class SeqBatch:
    obs_idx: np.ndarray  # (B, T1, P1) int64
    obs_len: np.ndarray  # (B,)
    task_idx: np.ndarray  # (B, T2, P2)
    task_len: np.ndarray

    @property
    def size(self) -> int:
        return self.obs_idx.shape[0]


def encode(seqs: Sequence[Sequence[Token]]) -> tuple[np.ndarray, np.ndarray]:
    """Pad token sequences into ``(idx, lengths)``; unused slots hold -1."""
    if not seqs:
        raise ShapeError("empty batch")
    T = max(len(s) for s in seqs)
    if T == 0:
        raise ShapeError("sequences must be non-empty")
    P = 1
    for s in seqs:
        for tok in s:
            if isinstance(tok, tuple):
                P = max(P, len(tok))
    idx = np.full((len(seqs), T, P), -1, dtype=np.int64)
    lengths = np.zeros(len(seqs), dtype=np.int64)
    for b, s in enumerate(seqs):
        if not s:
            raise ShapeError("sequences must be non-empty")
        lengths[b] = len(s)
        for t, tok in enumerate(s):
            if isinstance(tok, tuple):
                idx[b, t, : len(tok)] = tok
            else:
                idx[b, t, 0] = tok
    return idx, lengths


def make_batch(obs_seqs, task_seqs) -> SeqBatch:
    oi, ol = encode(obs_seqs)
    ti, tl = encode(task_seqs)
    return SeqBatch(oi, ol, ti, tl)


def _uniform(rng: np.random.Generator, fan_in: int, shape) -> np.ndarray:
    r = 1.0 / np.sqrt(max(fan_in, 1))
    return rng.uniform(-r, r, size=shape)


def _check_width(idx: np.ndarray, width: int, what: str) -> None:
    if idx.size and idx.max() >= width:
        raise ShapeError(f"{what} index {int(idx.max())} outside vocabulary of width {width}")


class QNet:
    """Common parameter handling; subclasses define forward/backward."""

    kind = "base"
    params: dict[str, np.ndarray]

    def meta(self) -> dict:
        raise NotImplementedError

    def forward(self, batch: SeqBatch):
        raise NotImplementedError

    def backward(self, cache, dQ: np.ndarray) -> dict[str, np.ndarray]:
        raise NotImplementedError

    def predict(self, batch: SeqBatch) -> np.ndarray:
        return self.forward(batch)[0]

    def copy(self) -> "QNet":
        other = object.__new__(type(self))
        other.__dict__.update(self.__dict__)
        other.params = {k: v.copy() for k, v in self.params.items()}
        return other

    def load_from(self, other: "QNet") -> None:
        for k, v in other.params.items():
            np.copyto(self.params[k], v)

    def n_parameters(self) -> int:
        return sum(v.size for v in self.params.values())


def _dense_forward(params, z):
    a1 = z @ params["d1.W"] + params["d1.b"]
    r1 = np.maximum(a1, 0.0)
    a2 = r1 @ params["d2.W"] + params["d2.b"]
    r2 = np.maximum(a2, 0.0)
    Q = r2 @ params["head.W"] + params["head.b"]
    return Q, (z, a1, r1, a2, r2)


def _dense_backward(params, cache, dQ, grads):
    z, a1, r1, a2, r2 = cache
    grads["head.W"] = r2.T @ dQ
    grads["head.b"] = dQ.sum(axis=0)
    d2 = (dQ @ params["head.W"].T) * (a2 > 0)
    grads["d2.W"] = r1.T @ d2
    grads["d2.b"] = d2.sum(axis=0)
    d1 = (d2 @ params["d2.W"].T) * (a1 > 0)
    grads["d1.W"] = z.T @ d1
    grads["d1.b"] = d1.sum(axis=0)
    return d1 @ params["d1.W"].T


def _dense_init(params, rng, n_in, width, n_actions):
    params["d1.W"] = _uniform(rng, n_in, (n_in, width))
    params["d1.b"] = np.zeros(width)
    params["d2.W"] = _uniform(rng, width, (width, width))
    params["d2.b"] = np.zeros(width)
    params["head.W"] = _uniform(rng, width, (width, n_actions))
    params["head.b"] = np.zeros(n_actions)


class RecurrentQNet(QNet):
    """Twin-LSTM Q-network: observation LSTM and task LSTM, final hidden
    states concatenated and passed through two ReLU layers and a linear head."""

    kind = "lstm"

    def __init__(
        self,
        n_obs: int,
        n_task: int,
        n_actions: int,
        obs_hidden: int = 32,
        task_hidden: int = 16,
        dense: int = 16,
        rng: np.random.Generator | None = None,
    ):
        rng = rng or np.random.default_rng(0)
        self.n_obs, self.n_task, self.n_actions = n_obs, n_task, n_actions
        self.obs_hidden, self.task_hidden, self.dense = obs_hidden, task_hidden, dense
        p: dict[str, np.ndarray] = {}
        for name, n_in, h in (("obs", n_obs, obs_hidden), ("task", n_task, task_hidden)):
            p[f"{name}.Wx"] = _uniform(rng, n_in, (n_in, 4 * h))
            p[f"{name}.Wh"] = _uniform(rng, h, (h, 4 * h))
            b = np.zeros(4 * h)
            b[h : 2 * h] = 1.0  # forget gate
            p[f"{name}.b"] = b
        _dense_init(p, rng, obs_hidden + task_hidden, dense, n_actions)
        self.params = p

    def meta(self) -> dict:
        return dict(
            kind=self.kind,
            n_obs=self.n_obs,
            n_task=self.n_task,
            n_actions=self.n_actions,
            obs_hidden=self.obs_hidden,
            task_hidden=self.task_hidden,
            dense=self.dense,
        )

    def forward(self, batch: SeqBatch):
        p = self.params
        _check_width(batch.obs_idx, self.n_obs, "observation")
        _check_width(batch.task_idx, self.n_task, "task")
        ho = lstm_forward(p["obs.Wx"], p["obs.Wh"], p["obs.b"], batch.obs_idx, batch.obs_len)
        ht = lstm_forward(p["task.Wx"], p["task.Wh"], p["task.b"], batch.task_idx, batch.task_len)
        rows = np.arange(batch.size)
        z = np.concatenate([ho[0][rows, batch.obs_len], ht[0][rows, batch.task_len]], axis=1)
        Q, dcache = _dense_forward(p, z)
        return Q, (batch, ho, ht, dcache)

    def backward(self, cache, dQ):
        if cache is None:
            raise ValueError("backward needs the cache returned by forward")
        batch, ho, ht, dcache = cache
        p = self.params
        grads: dict[str, np.ndarray] = {}
        dz = _dense_backward(p, dcache, np.asarray(dQ, dtype=float), grads)
        Ho = self.obs_hidden
        for name, (hs, cs, acts), idx, lens, dh in (
            ("obs", ho, batch.obs_idx, batch.obs_len, dz[:, :Ho]),
            ("task", ht, batch.task_idx, batch.task_len, dz[:, Ho:]),
        ):
            dWx, dWh, db = lstm_backward(
                p[f"{name}.Wx"], p[f"{name}.Wh"], idx, lens, hs, cs, acts, np.ascontiguousarray(dh)
            )
            grads[f"{name}.Wx"], grads[f"{name}.Wh"], grads[f"{name}.b"] = dWx, dWh, db
        return grads


class DenseQNet(QNet):
    """Fixed-window baseline: the observation and task windows are flattened
    into one multi-hot vector (most recent entry in the last slot) and fed
    through the same two ReLU layers and head, with no recurrence."""

    kind = "dense"

    def __init__(
        self,
        n_obs: int,
        n_task: int,
        n_actions: int,
        obs_window: int,
        task_window: int,
        dense: int = 16,
        rng: np.random.Generator | None = None,
    ):
        rng = rng or np.random.default_rng(0)
        self.n_obs, self.n_task, self.n_actions = n_obs, n_task, n_actions
        self.obs_window, self.task_window, self.dense = obs_window, task_window, dense
        self.n_in = obs_window * n_obs + task_window * n_task
        p: dict[str, np.ndarray] = {}
        p["in.W"] = _uniform(rng, obs_window + task_window, (self.n_in, dense))
        p["in.b"] = np.zeros(dense)
        p["d2.W"] = _uniform(rng, dense, (dense, dense))
        p["d2.b"] = np.zeros(dense)
        p["head.W"] = _uniform(rng, dense, (dense, n_actions))
        p["head.b"] = np.zeros(n_actions)
        self.params = p

    def meta(self) -> dict:
        return dict(
            kind=self.kind,
            n_obs=self.n_obs,
            n_task=self.n_task,
            n_actions=self.n_actions,
            obs_window=self.obs_window,
            task_window=self.task_window,
            dense=self.dense,
        )

    def features(self, batch: SeqBatch) -> np.ndarray:
        _check_width(batch.obs_idx, self.n_obs, "observation")
        _check_width(batch.task_idx, self.n_task, "task")
        parts = []
        for idx, lens, win, width, base in (
            (batch.obs_idx, batch.obs_len, self.obs_window, self.n_obs, 0),
            (batch.task_idx, batch.task_len, self.task_window, self.n_task, self.obs_window * self.n_obs),
        ):
            B, T, P = idx.shape
            t = np.arange(T)[None, :]
            slot = win - lens[:, None] + t  # right-align the most recent token
            valid = (t < lens[:, None]) & (slot >= 0)
            feat = base + slot[:, :, None] * width + idx
            feat = np.where(valid[:, :, None] & (idx >= 0), feat, -1)
            parts.append(feat.reshape(B, T * P))
        return np.concatenate(parts, axis=1)

    def forward(self, batch: SeqBatch):
        p = self.params
        feat = self.features(batch)
        padded = np.vstack([p["in.W"], np.zeros((1, self.dense))])
        a1 = padded[np.where(feat >= 0, feat, self.n_in)].sum(axis=1) + p["in.b"]
        r1 = np.maximum(a1, 0.0)
        a2 = r1 @ p["d2.W"] + p["d2.b"]
        r2 = np.maximum(a2, 0.0)
        Q = r2 @ p["head.W"] + p["head.b"]
        return Q, (feat, a1, r1, a2, r2)

    def backward(self, cache, dQ):
        if cache is None:
            raise ValueError("backward needs the cache returned by forward")
        feat, a1, r1, a2, r2 = cache
        p = self.params
        dQ = np.asarray(dQ, dtype=float)
        g = {"head.W": r2.T @ dQ, "head.b": dQ.sum(axis=0)}
        d2 = (dQ @ p["head.W"].T) * (a2 > 0)
        g["d2.W"] = r1.T @ d2
        g["d2.b"] = d2.sum(axis=0)
        d1 = (d2 @ p["d2.W"].T) * (a1 > 0)
        g["in.b"] = d1.sum(axis=0)
        dW = np.zeros((self.n_in + 1, self.dense))
        sel = np.where(feat >= 0, feat, self.n_in)
        for j in range(sel.shape[1]):
            np.add.at(dW, sel[:, j], d1)
        g["in.W"] = dW[:-1]
        return g


class TabularQNet(QNet):
    """Linear head on the one-hot of (latest observation, latest task token).

    With one-step windows this is exactly a lookup table over product
    states, so it serves as the tabular limit of the recurrent agent.
    """

    kind = "tabular"

    def __init__(self, n_obs: int, n_task: int, n_actions: int, rng: np.random.Generator | None = None):
        self.n_obs, self.n_task, self.n_actions = n_obs, n_task, n_actions
        self.params = {"W": np.zeros((n_obs * n_task, n_actions))}

    def meta(self) -> dict:
        return dict(kind=self.kind, n_obs=self.n_obs, n_task=self.n_task, n_actions=self.n_actions)

    def _rows(self, batch: SeqBatch) -> np.ndarray:
        _check_width(batch.obs_idx, self.n_obs, "observation")
        _check_width(batch.task_idx, self.n_task, "task")
        b = np.arange(batch.size)
        o = batch.obs_idx[b, batch.obs_len - 1, 0]
        q = batch.task_idx[b, batch.task_len - 1, 0]
        return o * self.n_task + q

    def forward(self, batch: SeqBatch):
        rows = self._rows(batch)
        return self.params["W"][rows].copy(), rows

    def backward(self, cache, dQ):
        if cache is None:
            raise ValueError("backward needs the cache returned by forward")
        dW = np.zeros_like(self.params["W"])
        np.add.at(dW, cache, np.asarray(dQ, dtype=float))
        return {"W": dW}


NETS = {cls.kind: cls for cls in (RecurrentQNet, DenseQNet, TabularQNet)}


def from_meta(meta: dict) -> QNet:
    meta = dict(meta)
    cls = NETS[meta.pop("kind")]
    return cls(**meta)


def lstm_final_hidden(net: RecurrentQNet, which: str, seq: Sequence[Token]) -> np.ndarray:
    """Final hidden vector of one LSTM of ``net`` on a single sequence."""
    idx, lens = encode([seq])
    p = net.params
    width = net.n_obs if which == "obs" else net.n_task
    _check_width(idx, width, which)
    hs, _, _ = lstm_forward(p[f"{which}.Wx"], p[f"{which}.Wh"], p[f"{which}.b"], idx, lens)
    return hs[0, lens[0]]
