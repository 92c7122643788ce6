import os
import subprocess
import sys

import numpy as np
import pytest

from wiretap_kit import _kernels_py as ref
from wiretap_kit import kernels
from wiretap_kit.expander import cycle, margulis

compiled = pytest.importorskip("wiretap_kit._kernels")


def test_backend_reported():
    assert kernels.BACKEND in ("compiled", "python")


def test_pure_env_forces_fallback():
    env = dict(os.environ, WIRETAP_KIT_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import wiretap_kit; print(wiretap_kit.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_walk_ends_agree():
    G = margulis(4)
    rng = np.random.default_rng(0)
    starts = rng.integers(0, G.N, 200)
    labels = rng.integers(0, G.d, (200, 9))
    assert np.array_equal(compiled.walk_ends(G.perms, starts, labels),
                          ref.walk_ends(G.perms, starts, labels))


@pytest.mark.parametrize("G,length", [(cycle(4), 6), (cycle(5), 5), (margulis(3), 2)])
def test_sf_walk_dfs_agree(G, length):
    rng = np.random.default_rng(1)
    c0 = rng.integers(0, 3, G.N)
    assert np.array_equal(compiled.sf_walk_dfs(G.perms, c0, length),
                          ref.sf_walk_dfs(G.perms, c0, length))


def test_gf2_apply_agree():
    rng = np.random.default_rng(2)
    rows = [int(r) for r in rng.integers(0, 1 << 20, 5)]
    xs = rng.integers(0, 1 << 20, 500).astype(np.uint64)
    a = compiled.gf2_apply(rows, xs)
    b = ref.gf2_apply(rows, xs)
    assert np.array_equal(np.asarray(a), np.asarray(b))


def test_gf2_apply_against_dot():
    rows = [0b101, 0b011]
    xs = np.arange(8, dtype=np.uint64)
    out = ref.gf2_apply(rows, xs)
    for x, y in zip(range(8), out):
        expect = (bin(x & 0b101).count("1") % 2) << 1 | (bin(x & 0b011).count("1") % 2)
        assert int(y) == expect


def test_coset_histograms_agree():
    rng = np.random.default_rng(3)
    table = rng.integers(0, 4, 64)
    elems = np.array([[0, 1, 2, 3], [0, 4, 8, 12], [0, 5, 10, 15]])
    reps = np.array([0, 16, 32, 48, 7])
    a = compiled.coset_histograms(table, elems, reps, 4)
    b = ref.coset_histograms(table, elems, reps, 4)
    assert np.array_equal(np.asarray(a), np.asarray(b))
    assert (np.asarray(b).sum(axis=1) == 4).all()
    # direct count for one row
    s, r = 1, 4
    counts = np.bincount(table[elems[s] ^ reps[r]], minlength=4)
    assert np.array_equal(np.asarray(b)[s * len(reps) + r], counts)
