"""Numpy implementation of the LSTM kernels, vectorised over the batch.

Same signatures and layout as the compiled module; used when the
extension is not built or ``LDGBA_PLANNER_PURE=1`` is set.
"""
from __future__ import annotations

import numpy as np


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    z = np.exp(x[~pos])
    out[~pos] = z / (1.0 + z)
    return out


def _input_rows(Wx: np.ndarray, idx_t: np.ndarray) -> np.ndarray:
    """Sum of the Wx rows selected by each sample's active indices."""
    padded = np.vstack([Wx, np.zeros((1, Wx.shape[1]))])
    sel = np.where(idx_t >= 0, idx_t, Wx.shape[0])
    return padded[sel].sum(axis=1)


def lstm_forward(Wx, Wh, b, idx, lengths):
    B, T, _ = idx.shape
    H = Wh.shape[0]
    hs = np.zeros((B, T + 1, H))
    cs = np.zeros((B, T + 1, H))
    acts = np.zeros((B, T, 4 * H))
    for t in range(T):
        live = lengths > t
        if not live.any():
            break
        pre = b + _input_rows(Wx, idx[:, t]) + hs[:, t] @ Wh
        a = np.concatenate([_sigmoid(pre[:, : 3 * H]), np.tanh(pre[:, 3 * H :])], axis=1)
        i, f, o, g = a[:, :H], a[:, H : 2 * H], a[:, 2 * H : 3 * H], a[:, 3 * H :]
        c = f * cs[:, t] + i * g
        h = o * np.tanh(c)
        acts[live, t] = a[live]
        cs[live, t + 1] = c[live]
        hs[live, t + 1] = h[live]
    return hs, cs, acts


def lstm_backward(Wx, Wh, idx, lengths, hs, cs, acts, dh_final):
    B, T, P = idx.shape
    H = Wh.shape[0]
    dWx = np.zeros((Wx.shape[0] + 1, 4 * H))
    dWh = np.zeros_like(Wh)
    db = np.zeros(4 * H)
    dh = np.array(dh_final, dtype=float, copy=True)
    dc = np.zeros((B, H))
    for t in range(int(lengths.max()) - 1, -1, -1):
        live = (lengths > t)[:, None]
        a = acts[:, t]
        i, f, o, g = a[:, :H], a[:, H : 2 * H], a[:, 2 * H : 3 * H], a[:, 3 * H :]
        tc = np.tanh(cs[:, t + 1])
        dcc = dc + dh * o * (1.0 - tc * tc)
        da = np.concatenate(
            [
                dcc * g * i * (1.0 - i),
                dcc * cs[:, t] * f * (1.0 - f),
                dh * tc * o * (1.0 - o),
                dcc * i * (1.0 - g * g),
            ],
            axis=1,
        )
        da = np.where(live, da, 0.0)
        db += da.sum(axis=0)
        sel = np.where(idx[:, t] >= 0, idx[:, t], Wx.shape[0])
        for p in range(P):
            np.add.at(dWx, sel[:, p], da)
        dWh += hs[:, t].T @ da
        dc = np.where(live, dcc * f, dc)
        dh = np.where(live, da @ Wh.T, dh)
    return dWx[:-1], dWh, db
