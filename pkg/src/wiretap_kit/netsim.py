"""Linear network coding on acyclic unit-capacity networks, with an outer wiretap code."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import codec
from .config import check_cap
from .errors import (
    DomainError,
    NoSolution,
    RankDeficientAfterRetries,
    ShapeMismatch,
    SingularTransfer,
    UnreachableReceiver,
)
from .gf import field, rank, solve_affine
from .wiretap import ResilienceReport, _digits_array, _record, observation_counts

RETRIES = 16


class NetworkSpec:
    """Directed acyclic multigraph; edge ``i`` is ``edges[i] = (tail, head)``."""

    def __init__(self, vertices, edges, source, receivers, q=2, name="network"):
        self.vertices = list(vertices)
        self.edges = [tuple(e) for e in edges]
        self.source = source
        self.receivers = list(receivers)
        self.q = q
        self.name = name
        known = set(self.vertices)
        if source not in known or any(r not in known for r in self.receivers):
            raise DomainError("source and receivers must be vertices")
        if any(u not in known or v not in known for u, v in self.edges):
            raise DomainError("edge endpoint is not a vertex")
        self.order = self._topological_order()
        reach = self._reachable()
        for r in self.receivers:
            if r not in reach:
                raise UnreachableReceiver(f"receiver {r!r} is not reachable from the source")
        field(q)

    def __repr__(self):
        return f"NetworkSpec({self.name}, |V|={len(self.vertices)}, |E|={len(self.edges)})"

    def in_edges(self, v):
        return [i for i, (_, h) in enumerate(self.edges) if h == v]

    def out_edges(self, v):
        return [i for i, (t, _) in enumerate(self.edges) if t == v]

    def _topological_order(self):
        indeg = {v: 0 for v in self.vertices}
        for _, h in self.edges:
            indeg[h] += 1
        queue = deque(v for v in self.vertices if indeg[v] == 0)
        order = []
        while queue:
            v = queue.popleft()
            order.append(v)
            for i in self.out_edges(v):
                h = self.edges[i][1]
                indeg[h] -= 1
                if indeg[h] == 0:
                    queue.append(h)
        if len(order) != len(self.vertices):
            raise DomainError("network has a cycle")
        return order

    def _reachable(self):
        seen, stack = {self.source}, [self.source]
        while stack:
            v = stack.pop()
            for i in self.out_edges(v):
                h = self.edges[i][1]
                if h not in seen:
                    seen.add(h)
                    stack.append(h)
        return seen

    def edge_order(self):
        """Edges sorted by the position of their tail in topological order."""
        pos = {v: i for i, v in enumerate(self.order)}
        return sorted(range(len(self.edges)), key=lambda i: (pos[self.edges[i][0]], i))

    def to_json(self):
        return {"vertices": self.vertices, "edges": [list(e) for e in self.edges],
                "source": self.source, "receivers": self.receivers, "q": self.q}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["vertices"], obj["edges"], obj["source"], obj["receivers"],
                   obj.get("q", 2), obj.get("name", "network"))


# ---------------------------------------------------------------------------
# Named topologies


def path_network(length=1, q=2):
    vs = [f"v{i}" for i in range(length + 1)]
    return NetworkSpec(vs, list(zip(vs, vs[1:])), vs[0], [vs[-1]], q, name="path")


def parallel_network(width=2, q=2):
    vs = ["s"] + [f"m{i}" for i in range(width)] + ["r"]
    edges = [("s", f"m{i}") for i in range(width)] + [(f"m{i}", "r") for i in range(width)]
    return NetworkSpec(vs, edges, "s", ["r"], q, name="parallel")


def butterfly_network(q=2):
    vs = ["s", "a", "b", "c", "d", "r1", "r2"]
    edges = [("s", "a"), ("s", "b"), ("a", "r1"), ("a", "c"), ("b", "c"),
             ("b", "r2"), ("c", "d"), ("d", "r1"), ("d", "r2")]
    return NetworkSpec(vs, edges, "s", ["r1", "r2"], q, name="butterfly")


def diamond_network(q=2):
    vs = ["s", "a", "b", "r"]
    edges = [("s", "a"), ("s", "b"), ("a", "r"), ("b", "r"), ("a", "b")]
    return NetworkSpec(vs, edges, "s", ["r"], q, name="diamond")


TOPOLOGIES = {
    "path": path_network,
    "parallel": parallel_network,
    "butterfly": butterfly_network,
    "diamond": diamond_network,
}


# ---------------------------------------------------------------------------
# Max flow


def min_cut(net, receiver):
    """Max-flow value with unit edge capacities (shortest augmenting paths)."""
    if receiver not in net.vertices:
        raise DomainError(f"{receiver!r} is not a vertex")
    if receiver not in net._reachable():
        raise UnreachableReceiver(f"receiver {receiver!r} is not reachable")
    if receiver == net.source:
        raise DomainError("receiver coincides with the source")
    flow = [0] * len(net.edges)
    adj = {v: [] for v in net.vertices}
    for i, (u, v) in enumerate(net.edges):
        adj[u].append((i, +1))
        adj[v].append((i, -1))
    value = 0
    while True:
        parent = {net.source: None}
        queue = deque([net.source])
        while queue and receiver not in parent:
            u = queue.popleft()
            for i, sign in adj[u]:
                tail, head = net.edges[i]
                nxt, ok = (head, flow[i] == 0) if sign > 0 else (tail, flow[i] == 1)
                if ok and nxt not in parent:
                    parent[nxt] = (u, i, sign)
                    queue.append(nxt)
        if receiver not in parent:
            return value
        v = receiver
        while parent[v] is not None:
            u, i, sign = parent[v]
            flow[i] += sign
            v = u
        value += 1


# ---------------------------------------------------------------------------
# Codes


@dataclass
class NetworkCode:
    """Local coding coefficients per edge; source edges combine the n source symbols."""

    net: NetworkSpec
    n: int
    local: dict
    global_vectors: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        F = field(self.net.q)
        g = {}
        for e in self.net.edge_order():
            tail = self.net.edges[e][0]
            coeffs = np.asarray(self.local[e], dtype=np.int64)
            if tail == self.net.source:
                if coeffs.shape != (self.n,):
                    raise ShapeMismatch(f"source edge {e} needs {self.n} coefficients")
                g[e] = coeffs
            else:
                ins = self.net.in_edges(tail)
                if coeffs.shape != (len(ins),):
                    raise ShapeMismatch(f"edge {e} needs {len(ins)} coefficients")
                acc = np.zeros(self.n, dtype=np.int64)
                for c, i in zip(coeffs.tolist(), ins):
                    acc = F.add(F.scale(c, g[i]), acc)
                g[e] = acc
        self.global_vectors = g

    def transfer(self, receiver):
        ins = self.net.in_edges(receiver)
        return np.array([self.global_vectors[e] for e in ins], dtype=np.int64).reshape(len(ins), self.n)

    def to_json(self):
        return {"n": self.n, "local": {str(e): [int(c) for c in v] for e, v in sorted(self.local.items())}}


def _random_local(net, n, rng):
    local = {}
    for e, (tail, _) in enumerate(net.edges):
        if tail == net.source:
            # a uniform nonzero vector of source coefficients
            v = int(rng.integers(1, net.q**n))
            local[e] = [(v // net.q**(n - 1 - i)) % net.q for i in range(n)]
        else:
            local[e] = rng.integers(1, net.q, len(net.in_edges(tail))).tolist()
    return local


def assign_random_code(net, rng, n=None):
    """Random local coefficients (nonzero source vectors, nonzero scalars elsewhere),
    redrawn until every receiver has full rank."""
    F = field(net.q)
    cut = min(min_cut(net, r) for r in net.receivers)
    n = cut if n is None else n
    for _ in range(RETRIES):
        code = NetworkCode(net, n, _random_local(net, n, rng))
        if all(rank(F, code.transfer(r)) == min(n, min_cut(net, r)) for r in net.receivers):
            return code
    raise RankDeficientAfterRetries(f"no full-rank code over GF({net.q}) in {RETRIES} draws")


def butterfly_xor_code(net=None):
    """The classic code: both source symbols go out, the bottleneck carries their sum."""
    net = butterfly_network(2) if net is None else net
    local = {0: [1, 0], 1: [0, 1], 2: [1], 3: [1], 4: [1], 5: [1], 6: [1, 1], 7: [1], 8: [1]}
    return NetworkCode(net, 2, local)


def transmit(net, code, symbols):
    """Symbol on every edge (index -> field element) for the given source symbols."""
    F = field(net.q)
    s = np.asarray(symbols, dtype=np.int64)
    if s.shape != (code.n,):
        raise ShapeMismatch(f"need {code.n} source symbols")
    return {e: F.dot(code.global_vectors[e], s) for e in range(len(net.edges))}


def receiver_decode(code, receiver, observed):
    """Recover the source symbols from a receiver's incoming edge symbols.

    ``observed`` is a mapping from edge index to symbol, or a sequence in
    the receiver's incoming-edge order.
    """
    net = code.net
    F = field(net.q)
    ins = net.in_edges(receiver)
    vals = [observed[e] for e in ins] if isinstance(observed, dict) else list(observed)
    T = code.transfer(receiver)
    if rank(F, T) < code.n:
        raise SingularTransfer(f"receiver {receiver!r} has rank below {code.n}")
    try:
        sol = solve_affine(F, T, vals)
    except NoSolution:
        raise SingularTransfer("observations are inconsistent with the code") from None
    return tuple(int(v) for v in sol.particular)


# ---------------------------------------------------------------------------
# Outer wiretap code


@dataclass
class NetRunReport(ResilienceReport):
    receivers: dict = dc_field(default_factory=dict)
    wiretap_edges: tuple = ()

    def to_json(self):
        out = super().to_json()
        out["wiretap_edges"] = list(self.wiretap_edges)
        out["receivers"] = self.receivers
        return out


def wiretap_netcode_run(net, code, P, wiretap_edges, eps_target=None, gamma_target=None):
    """Exact view of an edge-wiretapper when the source injects protocol output."""
    from fractions import Fraction

    if P.q != net.q or P.n != code.n:
        raise ShapeMismatch("protocol must produce exactly n symbols over the network field")
    edges = tuple(sorted(set(wiretap_edges)))
    if any(not 0 <= e < len(net.edges) for e in edges):
        raise DomainError("unknown wiretap edge")
    eps = P.eps if eps_target is None else Fraction(eps_target)
    gamma = P.gamma if gamma_target is None else Fraction(gamma_target)
    M = P.q**P.m
    check_cap(M * P.seed_space)
    tab = np.asarray(P.encode_table())
    F = field(net.q)
    G = np.array([code.global_vectors[e] for e in edges], dtype=np.int64).reshape(len(edges), code.n)
    status = {r: True for r in net.receivers}
    keys = np.empty(tab.shape, dtype=np.int64)
    view_of = {}
    for yi in np.unique(tab).tolist():
        y = codec.to_digits(yi, P.q, P.n)
        sym = transmit(net, code, y)
        view = [sym[e] for e in edges]
        # the view must be the linear image of the source symbols
        assert view == [int(v) for v in F.matvec(G, np.array(y))] if edges else True
        view_of[yi] = codec.from_digits(view, P.q)
        for r in net.receivers:
            got = receiver_decode(code, r, sym)
            if got != y:
                status[r] = False
    for xi in range(tab.shape[0]):
        x = codec.to_digits(xi, P.q, P.m)
        for z in range(tab.shape[1]):
            keys[xi, z] = view_of[int(tab[xi, z])]
        for yi in set(tab[xi].tolist()):
            if P.decode_raw(codec.to_digits(yi, P.q, P.n)) != x:
                status = {r: False for r in status}
    counts = observation_counts(P, keys, P.q ** len(edges))
    rec = _record(edges, counts, P.q, P.m, eps, gamma)
    return NetRunReport(
        params={"name": P.name, "network": net.name, "q": net.q, "n": code.n},
        t=len(edges), epsilon_target=eps, gamma_target=gamma, subsets=[rec], q=P.q, m=P.m,
        receivers={str(r): ok for r, ok in status.items()}, wiretap_edges=edges,
    )


def single_edge_views(net, code, P):
    """One run per edge of the network, in edge order."""
    return [wiretap_netcode_run(net, code, P, [e]) for e in range(len(net.edges))]
