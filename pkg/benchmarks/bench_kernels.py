"""Compare the compiled and numpy LSTM kernels.

    python benchmarks/bench_kernels.py [--repeat 20]

Times forward and forward+backward passes for a few batch shapes typical of
training (minibatch 32, windows of 3 to 10 tokens) and checks that the two
backends agree.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from ldgba_planner.neural import _kernels_py

try:
    from ldgba_planner.neural import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

SHAPES = [  # (batch, steps, input vocab, hidden, tokens per step)
    (32, 5, 100, 32, 1),
    (32, 3, 6, 16, 1),
    (32, 10, 100, 32, 2),
    (1, 5, 100, 32, 1),
]


def make_case(B, T, I, H, P, seed=0):
    gen = np.random.default_rng(seed)
    Wx = gen.uniform(-0.2, 0.2, (I, 4 * H))
    Wh = gen.uniform(-0.2, 0.2, (H, 4 * H))
    b = np.zeros(4 * H)
    b[H:2 * H] = 1.0
    idx = gen.integers(0, I, size=(B, T, P)).astype(np.int64)
    lengths = gen.integers(1, T + 1, size=B).astype(np.int64)
    for i, n in enumerate(lengths):
        idx[i, n:] = -1
    dh = gen.normal(size=(B, H))
    return Wx, Wh, b, idx, lengths, dh


def run(mod, case):
    Wx, Wh, b, idx, lengths, dh = case
    hs, cs, acts = mod.lstm_forward(Wx, Wh, b, idx, lengths)
    return hs, mod.lstm_backward(Wx, Wh, idx, lengths, hs, cs, acts, dh)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    backends = [("numpy", _kernels_py)] + ([("cython", _kernels_c)] if _kernels_c else [])
    if _kernels_c is None:
        print("compiled extension not available; timing the numpy backend only")
    print(f"{'shape (B,T,I,H,P)':<24}{'backend':<8}{'forward ms':>12}{'fwd+bwd ms':>12}")
    for shape in SHAPES:
        case = make_case(*shape)
        results = {}
        for name, mod in backends:
            Wx, Wh, b, idx, lengths, _ = case
            fwd = min(timeit.repeat(lambda: mod.lstm_forward(Wx, Wh, b, idx, lengths), number=1, repeat=args.repeat))
            both = min(timeit.repeat(lambda: run(mod, case), number=1, repeat=args.repeat))
            results[name] = run(mod, case)
            print(f"{str(shape):<24}{name:<8}{fwd * 1e3:>12.3f}{both * 1e3:>12.3f}")
        if len(results) == 2:
            (h1, g1), (h2, g2) = results.values()
            err = max(np.max(np.abs(h1 - h2)), *(np.max(np.abs(a - c)) for a, c in zip(g1, g2)))
            print(f"{'':<24}max backend difference {err:.2e}")


if __name__ == "__main__":
    main()
