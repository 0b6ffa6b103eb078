"""Time the compiled kernels against the pure-Python reference.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on the same inputs under both backends; the end-to-end rows
swap ``cxnet.kernels.backend`` and run a full training or forward pass.
"""

import argparse
import timeit

import numpy as np

from cxnet import (
    FeatureMap,
    TrainConfig,
    build_polygonal,
    cxn_forward,
    init_scheme_config,
    kernels,
    train_embeddings,
)
from cxnet.kernels import _pure


def grid(n: int):
    """n x n grid of squares as a polygonal complex."""
    idx = lambda i, j: i * (n + 1) + j
    faces = [[idx(i, j), idx(i, j + 1), idx(i + 1, j + 1), idx(i + 1, j)] for i in range(n) for j in range(n)]
    return build_polygonal((n + 1) ** 2, faces)


def kernel_cases(rng):
    sizes = rng.integers(0, 8, 2000)
    ip = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    vals = rng.standard_normal((ip[-1], 16))
    x, W, b = rng.standard_normal((4000, 32)), rng.standard_normal((32, 32)), rng.standard_normal(32)

    n = 500
    deg = rng.integers(1, 8, n)
    gp = np.concatenate([[0], np.cumsum(deg)]).astype(np.int64)
    gi = rng.integers(0, n, gp[-1]).astype(np.int64)
    cw = np.concatenate([np.cumsum(rng.random(d)) for d in deg])
    starts = np.repeat(np.arange(n, dtype=np.int64), 10)
    u = rng.random((starts.shape[0], 19))

    Z = rng.uniform(-0.5, 0.5, (n, 16))
    ia, ib = rng.integers(0, n, 20000), rng.integers(0, n, 20000)
    sims, order = rng.random(20000), rng.permutation(20000)
    rows = np.arange(200, dtype=np.int64)
    ctr, ctx = rng.integers(0, 200, 2000), rng.integers(0, 200, 2000)
    lrs = np.full(2000, 0.01)

    return {
        "segment_reduce sum": lambda m: m.segment_reduce(vals, ip, kernels.SUM),
        "affine tanh": lambda m: m.affine(x, W, b, kernels.TANH),
        "sample_walks": lambda m: m.sample_walks(gp, gi, cw, starts, u),
        "sgd_pairs ip": lambda m: m.sgd_pairs(Z.copy(), ia, ib, sims, order, 0.01, 0, True),
        "skipgram_full": lambda m: m.skipgram_full(Z.copy(), rows, ctr, ctx, lrs),
    }


def end_to_end_cases():
    X = grid(12)
    rng = np.random.default_rng(0)
    H0 = FeatureMap({m: rng.standard_normal((X.count(m), 8)) for m in range(X.n + 1)})
    cfg = init_scheme_config(X, "adjacency", {m: 8 for m in range(X.n + 1)}, depth=2, seed=0)
    return {
        "train rw (12x12 grid)": lambda: train_embeddings(X, TrainConfig(method="rw", d=8, epochs=2, seed=0)),
        "train lap (12x12 grid)": lambda: train_embeddings(X, TrainConfig(method="lap", d=8, epochs=20, seed=0)),
        "forward adj (12x12 grid)": lambda: cxn_forward(X, H0, cfg),
    }


def best(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if kernels.fast is None:
        raise SystemExit("compiled kernels are not available; build with pip install -e .")

    rows = []
    for name, fn in kernel_cases(np.random.default_rng(0)).items():
        rows.append((name, best(lambda: fn(_pure), args.repeat), best(lambda: fn(kernels.fast), args.repeat)))
    saved = kernels.backend
    try:
        for name, fn in end_to_end_cases().items():
            kernels.backend = _pure
            tp = best(fn, args.repeat)
            kernels.backend = kernels.fast
            tf = best(fn, args.repeat)
            rows.append((name, tp, tf))
    finally:
        kernels.backend = saved

    print(f"{'case':<28}{'pure (s)':>12}{'compiled (s)':>14}{'speedup':>10}")
    for name, tp, tf in rows:
        print(f"{name:<28}{tp:>12.4f}{tf:>14.4f}{tp / tf:>9.1f}x")


if __name__ == "__main__":
    main()
