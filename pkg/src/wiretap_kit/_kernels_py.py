"""Pure numpy implementations of the hot kernels.

Signatures match the compiled ``_kernels`` extension exactly; this module is
used when the extension is not built and as the reference in tests.
"""

import numpy as np


def walk_ends(perms, starts, labels):
    """End vertices of walks ``starts[i]`` -> labels[i, 0] -> labels[i, 1] ..."""
    perms = np.asarray(perms, dtype=np.int64)
    cur = np.array(starts, dtype=np.int64, copy=True)
    labels = np.asarray(labels, dtype=np.int64)
    for j in range(labels.shape[1]):
        cur = perms[labels[:, j], cur]
    return cur


def sf_walk_dfs(perms, c0, length):
    """Max of sum_v |N*c_v - total| per number of free walk steps.

    ``c0`` holds integer start counts; every walk position is either fixed
    to one label or free (all labels summed).  Returns an int64 array of
    length ``length + 1`` indexed by the number of free steps.
    """
    perms = np.asarray(perms, dtype=np.int64)
    d, N = perms.shape
    best = np.full(length + 1, -1, dtype=np.int64)

    def rec(counts, depth, free):
        if depth == length:
            total = counts.sum()
            val = int(np.abs(N * counts - total).sum())
            if val > best[free]:
                best[free] = val
            return
        for t in range(d):
            nxt = np.empty_like(counts)
            nxt[perms[t]] = counts
            rec(nxt, depth + 1, free)
        nxt = np.zeros_like(counts)
        for t in range(d):
            nxt[perms[t]] += counts
        rec(nxt, depth + 1, free + 1)

    rec(np.asarray(c0, dtype=np.int64), 0, 0)
    return best


def gf2_apply(rows, xs):
    """Packed GF(2) matrix applied to a batch of packed vectors."""
    xs = np.asarray(xs, dtype=np.uint64)
    out = np.zeros(xs.shape, dtype=np.uint64)
    for r in rows:
        bit = (np.bitwise_count(xs & np.uint64(r)) & 1).astype(np.uint64)
        out = (out << np.uint64(1)) | bit
    return out


def coset_histograms(table, elems, reps, nout):
    """Output histograms of ``table`` over every coset ``elems[s] ^ reps[r]``.

    Returns an int64 array of shape (len(elems) * len(reps), nout); row
    ``s * len(reps) + r`` belongs to subspace s translated by reps[r].
    """
    table = np.asarray(table, dtype=np.int64)
    elems = np.asarray(elems, dtype=np.int64)
    reps = np.asarray(reps, dtype=np.int64)
    S, P = elems.shape
    R = reps.shape[0]
    vals = table[elems[:, None, :] ^ reps[None, :, None]].reshape(S * R, P)
    idx = (np.arange(S * R, dtype=np.int64)[:, None] * nout + vals).ravel()
    return np.bincount(idx, minlength=S * R * nout).reshape(S * R, nout)
