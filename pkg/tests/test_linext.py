import itertools
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wiretap_kit.dists import SourceDescriptor, symbol_fixing_sources
from wiretap_kit.errors import DomainError, ShapeMismatch
from wiretap_kit.gf import pack_row, unpack_row
from wiretap_kit.linext import (
    LinearSeededExtractor,
    effective_matrix,
    lse_extract,
    lse_invert,
    projection_family,
    random_family,
    seed_threshold,
    seedwise_distances,
    strongness_measure,
    strongness_of,
    toeplitz_family,
)


def test_zero_maps_to_zero():
    E = toeplitz_family(6, 2)
    for z in E.seeds:
        assert lse_extract(E, (0,) * 6, z) == (0, 0)


def test_identity_block_projection():
    # diagonal vector with a single 1 at the main diagonal of the first row block
    n, m = 5, 2
    v = [0] * (n + m - 1)
    v[n - 1] = 1
    E = LinearSeededExtractor(n, 1, m, [[pack_row([v[i - j + n - 1] for j in range(n)])
                                         for i in range(m)]] * 2)
    for x in itertools.product(range(2), repeat=n):
        assert lse_extract(E, x, 0) == x[:m]


def test_effective_matrix_fallback():
    E = LinearSeededExtractor(4, 1, 2, [[0b1000, 0b0100], [0, 0]])
    rows, fb = effective_matrix(E, 0)
    assert rows == [unpack_row(0b1000, 4), unpack_row(0b0100, 4)] and not fb
    rows, fb = effective_matrix(E, 1)
    assert rows == [(1, 0, 0, 0), (0, 1, 0, 0)] and fb
    assert E.fallback_fraction == Fraction(1, 2)


def test_invert_identity_like():
    E = projection_family(4, 2)
    rng = np.random.default_rng(0)
    frees = Counter()
    for _ in range(200):
        z, x = lse_invert(E, (1, 0), rng)
        assert x[:2] == (1, 0)
        frees[x[2:]] += 1
    assert len(frees) == 4


def test_family_shapes():
    E = toeplitz_family(4, 2)
    assert E.t == 5 and len(list(E.seeds)) == 32
    a = random_family(6, 2, 3, 42)
    b = random_family(6, 2, 3, 42)
    assert len(list(a.seeds)) == 8
    assert [a.raw_matrix(z) for z in a.seeds] == [b.raw_matrix(z) for z in b.seeds]
    with pytest.raises(DomainError):
        toeplitz_family(4, 2, t=6)
    with pytest.raises(DomainError):
        LinearSeededExtractor(4, 1, 2, [[1, 2]])


def test_toeplitz_structure():
    E = toeplitz_family(5, 3)
    for z in E.seeds:
        T = [unpack_row(r, 5) for r in E.raw_matrix(z)]
        for i in range(1, 3):
            for j in range(1, 5):
                assert T[i][j] == T[i - 1][j - 1]


def test_short_seed_toeplitz_reproducible():
    a = toeplitz_family(6, 2, t=2, master_seed=0)
    b = toeplitz_family(6, 2, t=2, master_seed=0)
    assert a.t == 2 and [a.raw_matrix(z) for z in a.seeds] == [b.raw_matrix(z) for z in b.seeds]


def test_invert_exhaustive_round_trip():
    E = toeplitz_family(6, 2, t=2)
    for y in range(4):
        for r in range(E.inverter_seed_space):
            z, x = E.invert_seeded(y, r)
            assert E.apply(x, z) == y


def test_joint_uniformity():
    E = toeplitz_family(6, 2, t=2)
    counts = Counter()
    for y in range(4):
        for r in range(E.inverter_seed_space):
            counts[E.invert_seeded(y, r)] += 1
    assert len(counts) == (1 << E.t) * (1 << 6)
    assert set(counts.values()) == {1}


@given(st.integers(0, 63), st.integers(0, 63))
def test_linearity(x1, x2):
    E = toeplitz_family(6, 2, t=3, master_seed=5)
    for z in E.seeds:
        assert E.apply(x1 ^ x2, z) == E.apply(x1, z) ^ E.apply(x2, z)


def test_batch_matches_scalar():
    E = random_family(8, 3, 2, 9)
    xs = np.arange(256, dtype=np.uint64)
    for z in E.seeds:
        assert E.apply_batch(xs, z).tolist() == [E.apply(int(x), z) for x in xs]


def test_shape_errors():
    E = toeplitz_family(4, 2)
    with pytest.raises(ShapeMismatch):
        lse_extract(E, (0, 1), 0)
    with pytest.raises(ShapeMismatch):
        lse_extract(E, 1 << 4, 0)


def test_strongness_examples():
    E = toeplitz_family(6, 2)
    full = SourceDescriptor.symbol_fixing(2, 6, {})
    full_rank = [z for z in E.seeds if z not in E.fallback_seeds]
    assert all(seedwise_distances(E, full)[z] == 0 for z in full_rank)
    point = SourceDescriptor.symbol_fixing(2, 6, {i: 0 for i in range(6)})
    assert strongness_of(E, point) == Fraction(3, 4)
    worst = strongness_measure(E, symbol_fixing_sources(2, 6, 4))
    assert worst <= Fraction(1, 8)


def test_strongness_is_joint_distance():
    E = toeplitz_family(4, 2, t=2, master_seed=1)
    src = SourceDescriptor.symbol_fixing(2, 4, {0: 1, 3: 0})
    pts = [pack_row(p) for p in src.points()]
    joint = Counter((z, E.apply(x, z)) for z in E.seeds for x in pts)
    total = len(pts) * 4
    size = 4 * 4
    direct = sum(abs(Fraction(joint.get((z, y), 0), total) - Fraction(1, size))
                 for z in E.seeds for y in range(4)) / 2
    assert strongness_of(E, src) == direct


def test_seed_threshold():
    assert seed_threshold([Fraction(0)] * 4) == 0
    assert seed_threshold([Fraction(1, 2)] * 4) == Fraction(1, 2)
    # one bad seed out of 32 with distance 1: threshold is 1/32
    assert seed_threshold([Fraction(0)] * 31 + [Fraction(1)]) == Fraction(1, 32)


@given(st.lists(st.fractions(0, 1), min_size=1, max_size=12))
def test_seed_threshold_is_minimal(ds):
    eps = seed_threshold(ds)
    assert Fraction(sum(1 for v in ds if v > eps), len(ds)) <= eps
    candidates = sorted(set(ds) | {Fraction(k, len(ds)) for k in range(len(ds) + 1)})
    for c in candidates:
        if c < eps:
            assert Fraction(sum(1 for v in ds if v > c), len(ds)) > c
