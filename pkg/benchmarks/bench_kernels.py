"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from wiretap_kit import _kernels_py
from wiretap_kit.affext import _subspaces_by_pivots, quadratic_bank
from wiretap_kit.expander import cycle, margulis

try:
    from wiretap_kit import _kernels as compiled
except ImportError:
    compiled = None


def cases():
    rng = np.random.default_rng(0)
    M = margulis(16)
    starts = rng.integers(0, M.N, 200_000)
    labels = rng.integers(0, M.d, (200_000, 12))
    yield "walk_ends", lambda k: k.walk_ends(M.perms, starts, labels)

    C = cycle(8)
    c0 = np.ones(C.N, dtype=np.int64)
    yield "sf_walk_dfs", lambda k: k.sf_walk_dfs(C.perms, c0, 7)

    rows = [int(r) for r in rng.integers(0, 1 << 20, 8)]
    xs = rng.integers(0, 1 << 20, 1_000_000).astype(np.uint64)
    yield "gf2_apply", lambda k: k.gf2_apply(rows, xs)

    table = quadratic_bank(6, 2).table()
    subspaces = list(_subspaces_by_pivots(6, 3))
    yield "coset_histograms", lambda k: [k.coset_histograms(table, span, reps, 4)
                                         for _, span, reps in subspaces]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':<18}{'python [ms]':>14}{'compiled [ms]':>16}{'speedup':>10}")
    for name, fn in cases():
        py = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat)) * 1e3
        if compiled is None:
            print(f"{name:<18}{py:>14.2f}{'n/a':>16}{'':>10}")
            continue
        a, b = fn(_kernels_py), fn(compiled)
        same = all(np.array_equal(np.asarray(x), np.asarray(y)) for x, y in zip(
            a if isinstance(a, list) else [a], b if isinstance(b, list) else [b]))
        if not same:
            raise SystemExit(f"{name}: backends disagree")
        cc = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<18}{py:>14.2f}{cc:>16.2f}{py / cc:>9.1f}x")


if __name__ == "__main__":
    main()
