import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wiretap_kit.errors import DomainError, SingularTransfer, UnreachableReceiver
from wiretap_kit.gf import field, rank
from wiretap_kit.netsim import (
    NetworkCode,
    NetworkSpec,
    TOPOLOGIES,
    assign_random_code,
    butterfly_network,
    butterfly_xor_code,
    diamond_network,
    min_cut,
    parallel_network,
    path_network,
    receiver_decode,
    single_edge_views,
    transmit,
    wiretap_netcode_run,
)
from wiretap_kit.wiretap import identity_protocol, one_time_pad


def oracle_cut(net, r):
    G = nx.DiGraph()
    for u, v in net.edges:
        if G.has_edge(u, v):
            G[u][v]["capacity"] += 1
        else:
            G.add_edge(u, v, capacity=1)
    return nx.maximum_flow_value(G, net.source, r)


def test_min_cut_examples():
    assert min_cut(path_network(3), "v3") == 1
    assert min_cut(parallel_network(2), "r") == 2
    net = butterfly_network()
    assert min_cut(net, "r1") == min_cut(net, "r2") == 2
    for name, make in TOPOLOGIES.items():
        net = make()
        for r in net.receivers:
            assert min_cut(net, r) == oracle_cut(net, r), name


@st.composite
def random_dag(draw):
    n = draw(st.integers(3, 7))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), min_size=1, max_size=14))
    edges.append((0, n - 1))
    return NetworkSpec(list(range(n)), edges, 0, [n - 1])


@settings(max_examples=40)
@given(random_dag())
def test_min_cut_matches_networkx(net):
    r = net.receivers[0]
    assert min_cut(net, r) == oracle_cut(net, r)


def test_spec_validation():
    with pytest.raises(DomainError):
        NetworkSpec(["a", "b"], [("a", "b"), ("b", "a")], "a", ["b"])
    with pytest.raises(UnreachableReceiver):
        NetworkSpec(["a", "b", "c"], [("a", "b")], "a", ["c"])
    with pytest.raises(DomainError):
        NetworkSpec(["a"], [("a", "z")], "a", ["a"])
    net = butterfly_network()
    assert NetworkSpec.from_json(net.to_json()).edges == net.edges


def test_random_code_full_rank_gf4():
    net = butterfly_network(q=4)
    code = assign_random_code(net, np.random.default_rng(0))
    F = field(4)
    for r in net.receivers:
        assert rank(F, code.transfer(r)) == 2


def test_single_path_code():
    net = path_network(1)
    code = assign_random_code(net, np.random.default_rng(0))
    assert code.transfer("v1").tolist() == [[1]]


def test_xor_code_rank_and_decoding():
    code = butterfly_xor_code()
    net = code.net
    for r in net.receivers:
        assert rank(field(2), code.transfer(r)) == 2
    for s in itertools.product(range(2), repeat=2):
        sym = transmit(net, code, s)
        assert sym[6] == s[0] ^ s[1]
        for r in net.receivers:
            assert receiver_decode(code, r, sym) == s


def test_transmit_linear_and_identity():
    net = parallel_network(2)
    code = NetworkCode(net, 2, {0: [1, 0], 1: [0, 1], 2: [1], 3: [1]})
    assert receiver_decode(code, "r", transmit(net, code, (1, 0))) == (1, 0)
    zero = transmit(net, code, (0, 0))
    assert all(v == 0 for v in zero.values())


def test_singular_transfer():
    net = parallel_network(2)
    code = NetworkCode(net, 2, {0: [1, 0], 1: [1, 0], 2: [1], 3: [1]})
    with pytest.raises(SingularTransfer):
        receiver_decode(code, "r", [0, 0])


def test_butterfly_one_time_pad_views():
    code = butterfly_xor_code()
    runs = single_edge_views(code.net, code, one_time_pad())
    assert len(runs) == 9
    for run in runs:
        assert all(run.receivers.values())
    leaky = [run.wiretap_edges for run in runs if run.gamma_measured > 0]
    # the pad's decoder is the XOR carried on the bottleneck and everything downstream of it
    assert leaky == [(6,), (7,), (8,)]


def test_zero_edges_trivially_resilient():
    code = butterfly_xor_code()
    run = wiretap_netcode_run(code.net, code, one_time_pad(), [])
    assert run.gamma_measured == 0 and run.max_distance == 0


def test_min_cut_wiretap_leaks():
    code = butterfly_xor_code()
    run = wiretap_netcode_run(code.net, code, one_time_pad(), [0, 1])
    assert run.gamma_measured > 0


def test_identity_protocol_mismatch():
    code = butterfly_xor_code()
    with pytest.raises(Exception):
        wiretap_netcode_run(code.net, code, identity_protocol(), [0])


def test_diamond_random_code():
    net = diamond_network(q=2)
    code = assign_random_code(net, np.random.default_rng(4))
    assert rank(field(2), code.transfer("r")) == min_cut(net, "r")
