"""Regular graphs with consistent labelings.

A graph is given by ``d`` permutations of ``range(N)``: label ``t`` sends
vertex ``u`` to ``perms[t][u]``.  Consistency of the labeling is exactly
the statement that each of these maps is a bijection.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, NoConvergence, OutOfRange, UnsupportedFamily


class LabeledGraph:
    def __init__(self, perms, family="custom", name=None, check_symmetric=True):
        P = np.array(perms, dtype=np.int64)
        if P.ndim != 2 or P.shape[0] < 1 or P.shape[1] < 1:
            raise DomainError("labels must form a non-empty d x N table")
        self.d, self.N = P.shape
        ident = np.arange(self.N)
        for t in range(self.d):
            if not np.array_equal(np.sort(P[t]), ident):
                raise DomainError(f"label {t} is not a permutation")
        self.perms = P
        self.perms.setflags(write=False)
        inv = np.empty_like(P)
        for t in range(self.d):
            inv[t, P[t]] = ident
        self.inverse_perms = inv
        self.inverse_perms.setflags(write=False)
        self.family = family
        self.name = name or f"{family}({self.N})"
        if check_symmetric and not self.is_symmetric():
            raise DomainError("labeled graph is not symmetric as an undirected multigraph")
        self.inverse_labels = self._find_inverse_labels()

    def __repr__(self):
        return f"LabeledGraph({self.name}, N={self.N}, d={self.d})"

    def is_symmetric(self):
        edges = Counter()
        for t in range(self.d):
            for u, v in enumerate(self.perms[t]):
                edges[(u, int(v))] += 1
        return all(edges[(v, u)] == c for (u, v), c in edges.items())

    def _find_inverse_labels(self):
        """For each label, a label acting as its inverse permutation (or None)."""
        keys = {self.perms[t].tobytes(): t for t in range(self.d)}
        out = []
        for t in range(self.d):
            s = keys.get(self.inverse_perms[t].tobytes())
            if s is None:
                return None
            out.append(s)
        return tuple(out)

    def adjacency(self):
        """Dense normalised adjacency matrix (for small graphs and oracles)."""
        A = np.zeros((self.N, self.N))
        for t in range(self.d):
            A[np.arange(self.N), self.perms[t]] += 1.0 / self.d
        return A

    def apply(self, p):
        """One step of the random walk on a distribution vector: ``p A``."""
        p = np.asarray(p, dtype=float)
        out = np.zeros_like(p)
        for t in range(self.d):
            np.add.at(out, self.perms[t], p)
        return out / self.d

    def to_json(self):
        return {"N": self.N, "d": self.d, "family": self.family,
                "labels": self.perms.tolist()}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        G = cls(obj["labels"], family=obj.get("family", "custom"))
        if G.N != obj["N"] or G.d != obj["d"]:
            raise DomainError("N/d fields disagree with the label table")
        return G


def _check_vertex(G, u):
    if not 0 <= u < G.N:
        raise OutOfRange(f"vertex {u} not in [0, {G.N})")


def _check_label(G, t):
    if not 0 <= t < G.d:
        raise OutOfRange(f"label {t} not in [0, {G.d})")


def step(G, u, t):
    _check_vertex(G, u)
    _check_label(G, t)
    return int(G.perms[t, u])


def step_inverse(G, v, t):
    _check_vertex(G, v)
    _check_label(G, t)
    return int(G.inverse_perms[t, v])


def walk(G, start, labels):
    """Apply labels left to right starting at ``start``."""
    _check_vertex(G, start)
    v = start
    for t in labels:
        _check_label(G, t)
        v = int(G.perms[t, v])
    return v


def walk_inverse(G, end, labels):
    """The unique start vertex whose walk along ``labels`` ends at ``end``."""
    _check_vertex(G, end)
    v = end
    for t in reversed(labels):
        _check_label(G, t)
        v = int(G.inverse_perms[t, v])
    return v


def walk_batch(G, starts, labels):
    """Vectorised :func:`walk` over rows of a label matrix."""
    labels = np.asarray(labels, dtype=np.int64).reshape(len(starts), -1)
    return kernels.walk_ends(G.perms, starts, labels)


def walk_inverse_batch(G, ends, labels):
    labels = np.asarray(labels, dtype=np.int64).reshape(len(ends), -1)
    return kernels.walk_ends(G.inverse_perms, ends, labels[:, ::-1])


# ---------------------------------------------------------------------------
# Families


def cycle(N):
    """Cycle on N vertices; label 0 is +1 and label 1 is -1."""
    if N < 2:
        raise DomainError("cycle needs at least 2 vertices")
    u = np.arange(N)
    return LabeledGraph([(u + 1) % N, (u - 1) % N], family="cycle", name=f"cycle({N})")


def complete_selfloop(N):
    """Cayley graph of Z_N with every element as a generator: A = J/N."""
    u = np.arange(N)
    return LabeledGraph([(u + t) % N for t in range(N)], family="complete-selfloop",
                        name=f"complete-selfloop({N})")


def margulis(m):
    """8-regular Margulis–Gabber–Galil graph on Z_m x Z_m; vertex (x, y) is x*m + y."""
    if m < 2:
        raise DomainError("margulis needs m >= 2")
    x, y = np.divmod(np.arange(m * m), m)
    maps = [
        ((x + 2 * y) % m, y), ((x - 2 * y) % m, y),
        ((x + 2 * y + 1) % m, y), ((x - 2 * y - 1) % m, y),
        (x, (y + 2 * x) % m), (x, (y - 2 * x) % m),
        (x, (y + 2 * x + 1) % m), (x, (y - 2 * x - 1) % m),
    ]
    return LabeledGraph([a * m + b for a, b in maps], family="margulis", name=f"margulis({m})")


def power(G, k):
    """The k-th power: labels are k-tuples (big-endian), degree d**k."""
    perms = [np.arange(G.N)]
    for _ in range(k):
        perms = [G.perms[t][p] for p in perms for t in range(G.d)]
    return LabeledGraph(perms, family=f"{G.family}^{k}", name=f"{G.name}^{k}")


FAMILIES = {
    "cycle": cycle,
    "complete-selfloop": complete_selfloop,
    "margulis": margulis,
}


def family_graph(tag, size, power_of=1):
    try:
        G = FAMILIES[tag](size)
    except KeyError:
        raise UnsupportedFamily(f"unknown graph family {tag!r}") from None
    return power(G, power_of) if power_of > 1 else G


def graph_from_spec(spec):
    """Build a graph from a config mapping ``{family, size[, power]}`` or a label table."""
    if "labels" in spec:
        return LabeledGraph.from_json(spec)
    return family_graph(spec["family"], spec["size"], spec.get("power", 1))


# ---------------------------------------------------------------------------
# Spectrum


@dataclass(frozen=True)
class SpectralReport:
    lambda_estimate: float
    iterations: int
    residual: float

    def to_json(self):
        return {"lambda": self.lambda_estimate, "iterations": self.iterations,
                "residual": self.residual}


def second_eigenvalue(G, tol=1e-9, max_iter=200_000, seed=0):
    """Second largest |eigenvalue| of the normalised adjacency operator.

    Power iteration on A² restricted to the complement of the uniform
    vector, so that -1 (bipartite graphs) is found as readily as +1.
    Stops once the eigen-residual ``‖A²x - μx‖`` drops below ``tol``.
    """
    if G.N == 1:
        return SpectralReport(0.0, 0, 0.0)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(G.N)
    x -= x.mean()
    x /= np.linalg.norm(x)
    for it in range(1, max_iter + 1):
        y = G.apply(G.apply(x))
        y -= y.mean()
        mu = float(x @ y)
        resid = float(np.linalg.norm(y - mu * x))
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            return SpectralReport(0.0, it, 0.0)
        x = y / norm
        if resid <= tol:
            return SpectralReport(math.sqrt(max(mu, 0.0)), it, resid)
    raise NoConvergence(f"power iteration on {G.name} did not reach {tol} in {max_iter} steps")


def contraction(G, p):
    """(‖pA - u‖₂, ‖p - u‖₂) for a distribution vector p."""
    p = np.asarray(p, dtype=float)
    u = np.full(G.N, 1.0 / G.N)
    return float(np.linalg.norm(G.apply(p) - u)), float(np.linalg.norm(p - u))
