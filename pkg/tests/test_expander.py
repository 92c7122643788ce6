import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wiretap_kit.errors import DomainError, OutOfRange, UnsupportedFamily
from wiretap_kit.expander import (
    LabeledGraph,
    complete_selfloop,
    contraction,
    cycle,
    family_graph,
    graph_from_spec,
    margulis,
    power,
    second_eigenvalue,
    step,
    step_inverse,
    walk,
    walk_batch,
    walk_inverse,
    walk_inverse_batch,
)


def dense_lambda(G):
    ev = np.sort(np.abs(np.linalg.eigvalsh(G.adjacency())))
    return ev[-2]


def test_walk_examples():
    G = cycle(5)
    assert walk(G, 3, ()) == 3
    assert walk(G, 0, (0, 0, 1)) == 1
    assert step(margulis(3), 4, 0) == 1


def test_family_sizes():
    G = cycle(5)
    assert (G.N, G.d) == (5, 2)
    K = complete_selfloop(4)
    assert (K.N, K.d) == (4, 4)
    M = margulis(4)
    assert (M.N, M.d) == (16, 8)
    for t in range(8):
        assert sorted(M.perms[t]) == list(range(16))


def test_out_of_range():
    G = cycle(4)
    with pytest.raises(OutOfRange):
        step(G, 4, 0)
    with pytest.raises(OutOfRange):
        step(G, 0, 2)
    with pytest.raises(UnsupportedFamily):
        family_graph("petersen", 3)
    with pytest.raises(DomainError):
        LabeledGraph([[0, 0]])


@given(st.integers(3, 9), st.lists(st.integers(0, 1), max_size=12), st.integers(0, 100))
def test_walk_inverse_round_trip(N, labels, start):
    G = cycle(N)
    start %= N
    end = walk(G, start, labels)
    assert walk_inverse(G, end, labels) == start


@given(st.integers(0, 8), st.integers(0, 7))
def test_step_inverse_margulis(u, t):
    G = margulis(3)
    assert step_inverse(G, step(G, u, t), t) == u


def test_batch_matches_scalar():
    G = margulis(4)
    rng = np.random.default_rng(1)
    starts = rng.integers(0, G.N, 50)
    labels = rng.integers(0, G.d, (50, 6))
    ends = walk_batch(G, starts, labels)
    assert [int(e) for e in ends] == [walk(G, int(s), tuple(int(v) for v in l))
                                      for s, l in zip(starts, labels)]
    assert np.array_equal(walk_inverse_batch(G, ends, labels), starts)


def test_power_graph_walks():
    G = cycle(5)
    G2 = power(G, 2)
    assert G2.d == 4
    for u in range(5):
        for a in range(2):
            for b in range(2):
                assert step(G2, u, 2 * a + b) == walk(G, u, (a, b))


def test_second_eigenvalue_against_eigvalsh():
    for G in (cycle(5), cycle(7), margulis(3), margulis(4), complete_selfloop(8)):
        rep = second_eigenvalue(G)
        assert rep.lambda_estimate == pytest.approx(dense_lambda(G), abs=1e-6)
    assert second_eigenvalue(complete_selfloop(6)).lambda_estimate == pytest.approx(0, abs=1e-9)
    assert abs(second_eigenvalue(cycle(5)).lambda_estimate - abs(math.cos(4 * math.pi / 5))) <= 1e-6
    assert second_eigenvalue(cycle(4)).lambda_estimate == pytest.approx(1.0)
    for m in (3, 4, 5):
        assert second_eigenvalue(margulis(m)).lambda_estimate <= 0.89


def test_contraction_property():
    rng = np.random.default_rng(7)
    G = margulis(3)
    lam = second_eigenvalue(G).lambda_estimate
    for _ in range(50):
        p = rng.dirichlet(np.ones(G.N))
        after, before = contraction(G, p)
        assert after <= lam * before + 1e-12


def test_json_round_trip():
    G = margulis(3)
    H = LabeledGraph.from_json(G.to_json())
    assert np.array_equal(G.perms, H.perms)
    assert np.array_equal(graph_from_spec({"family": "cycle", "size": 6}).perms, cycle(6).perms)
    assert graph_from_spec({"family": "cycle", "size": 3, "power": 2}).d == 4
