# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# cython: language_level=3
"""Compiled LSTM forward/backward over index-encoded multi-hot sequences.

Layout shared with the numpy fallback in ``_kernels_py``:
  Wx (I, 4H), Wh (H, 4H), b (4H,), gate blocks ordered i, f, o, g;
  idx (B, T, P) int64, -1 marks an unused slot; lengths (B,) with
  1 <= lengths[b] <= T; steps at or beyond lengths[b] are not computed.
"""
import numpy as np
from libc.math cimport exp, tanh


cdef inline double _sigmoid(double x) noexcept nogil:
    cdef double z
    if x >= 0:
        return 1.0 / (1.0 + exp(-x))
    z = exp(x)
    return z / (1.0 + z)


def lstm_forward(const double[:, ::1] Wx, const double[:, ::1] Wh, const double[::1] b,
                 const long long[:, :, ::1] idx, const long long[::1] lengths):
    cdef Py_ssize_t B = idx.shape[0], T = idx.shape[1], P = idx.shape[2]
    cdef Py_ssize_t H = Wh.shape[0], G = Wh.shape[1]
    cdef Py_ssize_t bb, t, p, g, hh, L
    cdef long long k
    cdef double hv, c, ig, fg, og, gg
    hs_arr = np.zeros((B, T + 1, H))
    cs_arr = np.zeros((B, T + 1, H))
    acts_arr = np.zeros((B, T, G))
    pre_arr = np.empty(G)
    cdef double[:, :, ::1] hs = hs_arr
    cdef double[:, :, ::1] cs = cs_arr
    cdef double[:, :, ::1] acts = acts_arr
    cdef double[::1] pre = pre_arr
    with nogil:
        for bb in range(B):
            L = lengths[bb]
            for t in range(L):
                for g in range(G):
                    pre[g] = b[g]
                for p in range(P):
                    k = idx[bb, t, p]
                    if k >= 0:
                        for g in range(G):
                            pre[g] += Wx[k, g]
                for hh in range(H):
                    hv = hs[bb, t, hh]
                    if hv != 0.0:
                        for g in range(G):
                            pre[g] += hv * Wh[hh, g]
                for hh in range(H):
                    ig = _sigmoid(pre[hh])
                    fg = _sigmoid(pre[H + hh])
                    og = _sigmoid(pre[2 * H + hh])
                    gg = tanh(pre[3 * H + hh])
                    acts[bb, t, hh] = ig
                    acts[bb, t, H + hh] = fg
                    acts[bb, t, 2 * H + hh] = og
                    acts[bb, t, 3 * H + hh] = gg
                    c = fg * cs[bb, t, hh] + ig * gg
                    cs[bb, t + 1, hh] = c
                    hs[bb, t + 1, hh] = og * tanh(c)
    return hs_arr, cs_arr, acts_arr


def lstm_backward(const double[:, ::1] Wx, const double[:, ::1] Wh,
                  const long long[:, :, ::1] idx, const long long[::1] lengths,
                  const double[:, :, ::1] hs, const double[:, :, ::1] cs,
                  const double[:, :, ::1] acts, const double[:, ::1] dh_final):
    cdef Py_ssize_t B = idx.shape[0], P = idx.shape[2]
    cdef Py_ssize_t H = Wh.shape[0], G = Wh.shape[1]
    cdef Py_ssize_t bb, t, p, g, hh, L
    cdef long long k
    cdef double ig, fg, og, gg, tc, dcc, do_, hv, acc
    dWx_arr = np.zeros((Wx.shape[0], G))
    dWh_arr = np.zeros((H, G))
    db_arr = np.zeros(G)
    cdef double[:, ::1] dWx = dWx_arr
    cdef double[:, ::1] dWh = dWh_arr
    cdef double[::1] db = db_arr
    cdef double[::1] dh = np.empty(H)
    cdef double[::1] dc = np.empty(H)
    cdef double[::1] dh_prev = np.empty(H)
    cdef double[::1] da = np.empty(G)
    with nogil:
        for bb in range(B):
            L = lengths[bb]
            for hh in range(H):
                dh[hh] = dh_final[bb, hh]
                dc[hh] = 0.0
            for t in range(L - 1, -1, -1):
                for hh in range(H):
                    ig = acts[bb, t, hh]
                    fg = acts[bb, t, H + hh]
                    og = acts[bb, t, 2 * H + hh]
                    gg = acts[bb, t, 3 * H + hh]
                    tc = tanh(cs[bb, t + 1, hh])
                    do_ = dh[hh] * tc
                    dcc = dc[hh] + dh[hh] * og * (1.0 - tc * tc)
                    da[hh] = dcc * gg * ig * (1.0 - ig)
                    da[H + hh] = dcc * cs[bb, t, hh] * fg * (1.0 - fg)
                    da[2 * H + hh] = do_ * og * (1.0 - og)
                    da[3 * H + hh] = dcc * ig * (1.0 - gg * gg)
                    dc[hh] = dcc * fg
                for g in range(G):
                    db[g] += da[g]
                for p in range(P):
                    k = idx[bb, t, p]
                    if k >= 0:
                        for g in range(G):
                            dWx[k, g] += da[g]
                for hh in range(H):
                    hv = hs[bb, t, hh]
                    acc = 0.0
                    for g in range(G):
                        dWh[hh, g] += hv * da[g]
                        acc += Wh[hh, g] * da[g]
                    dh_prev[hh] = acc
                for hh in range(H):
                    dh[hh] = dh_prev[hh]
    return dWx_arr, dWh_arr, db_arr
