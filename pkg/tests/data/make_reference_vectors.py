"""Independent reference implementation used to produce reference_vectors.json.

Nothing here imports wiretap_kit: the walks, Toeplitz hashing, quadratic
forms and Mod maps are written out directly from their definitions.
Run ``python make_reference_vectors.py`` to regenerate the file.
"""

import json
import random
import sys
from pathlib import Path

import numpy as np


def bits(v, width, d=2):
    out = []
    for _ in range(width):
        out.append(v % d)
        v //= d
    return out[::-1]


def value(ds, d=2):
    v = 0
    for a in ds:
        v = v * d + a
    return v


def s(ds):
    return "".join(str(a) for a in ds)


# --- walks ------------------------------------------------------------------

def cycle_step(N):
    return lambda u, lab: (u + (1 if lab == 0 else -1)) % N


def margulis_step(m):
    def step(u, lab):
        x, y = divmod(u, m)
        nx, ny = [
            ((x + 2 * y) % m, y), ((x - 2 * y) % m, y),
            ((x + 2 * y + 1) % m, y), ((x - 2 * y - 1) % m, y),
            (x, (y + 2 * x) % m), (x, (y - 2 * x) % m),
            (x, (y + 2 * x + 1) % m), (x, (y - 2 * x - 1) % m),
        ][lab]
        return nx * m + ny
    return step


def walk(step, u, labels):
    for lab in labels:
        u = step(u, lab)
    return u


def sfext_suite(rnd):
    N, n, m = 4, 8, 2
    step = cycle_step(N)
    back = {0: 1, 1: 0}
    extract = []
    for i in range(1 << n):
        y = bits(i, n)
        extract.append([s(y), s(bits(walk(step, value(y[:m]), y[m:]), m))])
    invert = []
    space = 1 << (n - m)
    for x in range(1 << m):
        for z in range(0, space, space // 8):
            w = bits(z, n - m)
            v = walk(step, x, [back[a] for a in reversed(w)])
            invert.append([s(bits(x, m)), z, s(bits(v, m) + w)])
    return {"kind": "sfext", "params": {"graph": {"family": "cycle", "size": N}, "d": 2, "n": n, "m": m},
            "extract": extract, "invert": invert}


def margulis_suite(rnd):
    step = margulis_step(3)
    walks = []
    for _ in range(24):
        start = rnd.randrange(9)
        labels = [rnd.randrange(8) for _ in range(5)]
        walks.append([start, "".join(str(a) for a in labels), walk(step, start, labels)])
    return {"kind": "sfext", "params": {"graph": {"family": "margulis", "size": 3}, "d": 8, "n": 4, "m": 1},
            "walk": walks}


# --- Toeplitz -----------------------------------------------------------------

def toeplitz_apply(diag, x, n, m):
    return [sum(diag[i - j + n - 1] & x[j] for j in range(n)) % 2 for i in range(m)]


def toeplitz_diag(z, t, n, m, master_seed):
    tail = np.random.default_rng(master_seed).integers(0, 2, n + m - 1 - t).tolist()
    return bits(z, t) + tail


def lse_suite(rnd):
    n, m = 6, 2
    t = n + m - 1
    cases = []
    for _ in range(48):
        x = [rnd.randrange(2) for _ in range(n)]
        z = rnd.randrange(1 << t)
        cases.append([s(x), z, s(toeplitz_apply(toeplitz_diag(z, t, n, m, 0), x, n, m))])
    return {"kind": "lse", "params": {"n": n, "m": m, "master_seed": 0}, "extract": cases}


# --- composed affine extractor --------------------------------------------------

FORMS = [[(0, 1), (2, 3), (4, 5)], [(0, 1), (0, 2), (1, 4), (3, 5)]]


def iaext_suite(rnd):
    nd, t, m = 6, 2, 2
    extract = []
    for i in range(1 << (t + nd)):
        y = bits(i, t + nd)
        sd, x = y[:t], y[t:]
        a = [sum(x[p] & x[q] for p, q in f) % 2 for f in FORMS]
        z = value([u ^ v for u, v in zip(sd, a)])
        out = toeplitz_apply(toeplitz_diag(z, t, nd, m, 0), x, nd, m)
        extract.append([s(y), s(out)])
    return {"kind": "iaext", "params": {"n_data": nd, "t": t, "m": m, "master_seed": 0},
            "extract": extract}


# --- Mod --------------------------------------------------------------------------

def mod_suite(rnd, q=11, p=4):
    return {"kind": "mod", "params": {"q": q, "p": p},
            "map": [[x, 1 + x % p] for x in range(1, q + 1)],
            "preimages": [[y, [x for x in range(1, q + 1) if 1 + x % p == y]] for y in range(1, p + 1)]}


def build():
    rnd = random.Random(20240601)
    suites = [sfext_suite(rnd), margulis_suite(rnd), lse_suite(rnd), iaext_suite(rnd), mod_suite(rnd)]
    return {"version": 1, "producer": "independent-reference", "suites": suites}


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).with_name("reference_vectors.json")
    out.write_text(json.dumps(build(), sort_keys=True, indent=1) + "\n")
