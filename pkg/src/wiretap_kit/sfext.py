"""Random-walk symbol-fixing extractor, its perfect inverter, and the rounded variant.

Input ``(v, w)`` in ``[d]^m x [d]^(n-m)``: ``v`` names a start vertex of a
d-regular graph on ``d**m`` vertices and ``w`` is a walk; the output is the
end vertex.  Inverting picks ``w`` at random and walks backwards from the
target, which is a bijection in ``v`` for each fixed ``w``.

Vertex <-> string conversion is big-endian.  The Mod maps work on the
1-based ranges ``[q] = {1, ..., q}`` while vertices are ``0..N-1``; the shims
are ``vertex = value - 1``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import codec, kernels
from .base import InvertibleExtractor
from .config import check_cap
from .errors import DomainError, ShapeMismatch
from .expander import second_eigenvalue, walk, walk_inverse

log2 = math.log2


def _check_string(s, d, length):
    s = tuple(s)
    if len(s) != length:
        raise ShapeMismatch(f"expected a string of length {length}, got {len(s)}")
    if any(not 0 <= a < d for a in s):
        raise ShapeMismatch(f"symbols must lie in [0, {d})")
    return s


class SfextParams(InvertibleExtractor):
    """Parameters of the walk extractor on a graph with exactly ``d**m`` vertices."""

    def __init__(self, graph, d, n, m, k=None, lam=None):
        if graph.N != d**m:
            raise DomainError(f"graph has {graph.N} vertices, need d^m = {d**m}")
        if graph.d != d:
            raise DomainError(f"graph degree {graph.d} differs from alphabet size {d}")
        if not 0 < m < n:
            raise DomainError("need 0 < m < n")
        self.graph = graph
        self.d, self.n, self.m = d, n, m
        self.k = k
        self.lam = second_eigenvalue(graph).lambda_estimate if lam is None else lam
        self.seed_space = d ** (n - m)

    def __repr__(self):
        return f"SfextParams({self.graph.name}, d={self.d}, n={self.n}, m={self.m})"

    @property
    def error_bound(self):
        if self.k is None:
            return None
        return sfext_error_bound(self.n, self.m, self.k, self.d, self.lam)

    def extract(self, y):
        y = _check_string(y, self.d, self.n)
        v = codec.from_digits(y[: self.m], self.d)
        return codec.to_digits(walk(self.graph, v, y[self.m:]), self.d, self.m)

    def invert(self, x, z):
        x = _check_string(x, self.d, self.m)
        w = codec.to_digits(z, self.d, self.n - self.m)
        v = walk_inverse(self.graph, codec.from_digits(x, self.d), w)
        return codec.to_digits(v, self.d, self.m) + w

    def extract_table(self):
        size = check_cap(self.d**self.n)
        idx = np.arange(size, dtype=np.int64)
        starts, rest = np.divmod(idx, self.d ** (self.n - self.m))
        labels = _digit_matrix(rest, self.d, self.n - self.m)
        return kernels.walk_ends(self.graph.perms, starts, labels)

    def to_json(self):
        return {"kind": "sfext", "d": self.d, "n": self.n, "m": self.m,
                "graph": self.graph.name, "lambda": self.lam}


def _digit_matrix(values, d, length):
    out = np.empty((len(values), length), dtype=np.int64)
    v = np.array(values, dtype=np.int64, copy=True)
    for j in range(length - 1, -1, -1):
        v, out[:, j] = np.divmod(v, d)
    return out


def sfext_extract(p, y):
    return p.extract(y)


def sfext_invert(p, x, rng):
    return p.sample(x, rng)


def sfext_error_bound(n, m, k, d, lam):
    """2^(s/2) with s from the two-case formula (base-2 logs).

    ``lam == 0`` is handled by continuity: the bound is 0 whenever the
    λ-term has a positive coefficient.
    """
    if not 0 <= k <= n:
        raise DomainError("need 0 <= k <= n")
    if not 0 <= lam <= 1:
        raise DomainError("lambda must lie in [0, 1]")
    if k <= n - m:
        base, steps = m * log2(d), k
    else:
        base, steps = (n - k) * log2(d), n - m
    if steps == 0:
        return 2 ** (base / 2)
    if lam == 0:
        return 0.0
    return 2 ** ((base + steps * log2(lam * lam)) / 2)


def bound_assumption_violated(d, lam):
    """True when λ < 1/sqrt(d), outside the regime the bound is stated for."""
    return lam < 1 / math.sqrt(d)


def sfext_error_profile(p):
    """Exact worst-case error for each number of free symbols.

    Returns ``{k: Fraction}`` where entry k is the maximum of δ(output, U)
    over symbol-fixing sources with exactly k free coordinates.  Sources are
    enumerated by fixing each start digit or leaving it free and running a
    depth-first pass over the walk positions.
    """
    d, m, N = p.d, p.m, p.graph.N
    length = p.n - m
    best = {}
    for pattern in itertools.product(range(d + 1), repeat=m):
        c0 = np.ones(N, dtype=np.int64)
        for v in range(N):
            digits = codec.to_digits(v, d, m)
            if any(a != d and a != b for a, b in zip(pattern, digits)):
                c0[v] = 0
        k1 = sum(a == d for a in pattern)
        nums = kernels.sf_walk_dfs(p.graph.perms, c0, length)
        for k2, num in enumerate(nums):
            if num < 0:
                continue
            val = Fraction(int(num), 2 * N * d ** (k1 + k2))
            k = k1 + k2
            if val > best.get(k, -1):
                best[k] = val
    return dict(sorted(best.items()))


def errors_at_least(profile):
    """Turn an exactly-k profile into the error for min-entropy at least k."""
    out = {}
    running = Fraction(0)
    for k in sorted(profile, reverse=True):
        running = max(running, profile[k])
        out[k] = running
    return dict(sorted(out.items()))


def sfext_measured_error(p, k):
    """Extractor error over all sources with at least k free symbols."""
    return errors_at_least(sfext_error_profile(p))[k]


# ---------------------------------------------------------------------------
# Mod rounding


def mod_map(q, p, x):
    """Mod_{q,p}: [q] -> [p], x -> 1 + (x mod p), on 1-based ranges."""
    if not 1 <= p <= q:
        raise DomainError("need 1 <= p <= q")
    if not 1 <= x <= q:
        raise DomainError(f"{x} not in [1, {q}]")
    return 1 + x % p


def mod_preimages(q, p, y):
    if not 1 <= p <= q:
        raise DomainError("need 1 <= p <= q")
    if not 1 <= y <= p:
        raise DomainError(f"{y} not in [1, {p}]")
    r = (y - 1) % p
    first = r if r >= 1 else p
    return list(range(first, q + 1, p))


def mod_invert(q, p, y, rng):
    """Uniform preimage of y under Mod_{q,p}."""
    pre = mod_preimages(q, p, y)
    return pre[int(rng.integers(0, len(pre)))]


def mod_choice_space(q, p):
    """Size of a seed range that picks uniformly among preimages of any y."""
    lo, hi = q // p, -(-q // p)
    return math.lcm(lo, hi) if lo else hi


def mod_inverter_distribution(q, p, input_probs=None):
    """Exact output probabilities of the Mod inverter on ``[q]`` (index y-1)."""
    if input_probs is None:
        input_probs = [Fraction(1, p)] * p
    out = [Fraction(0)] * q
    for y in range(1, p + 1):
        pre = mod_preimages(q, p, y)
        for x in pre:
            out[x - 1] += Fraction(input_probs[y - 1]) / len(pre)
    return out


def mod_inverter_linf(q, p, input_probs=None):
    probs = mod_inverter_distribution(q, p, input_probs)
    return max(abs(v - Fraction(1, q)) for v in probs)


def mod_inverter_linf_bound(q, p, eps=0):
    """(1/q)(p + eps q)/(q - p) for inputs within eps/p of uniform in ℓ∞."""
    if not q > p:
        raise DomainError("the bound needs q > p")
    eps = Fraction(eps)
    return Fraction(1, q) * (p + eps * q) / (q - p)


class RoundedSfextParams(InvertibleExtractor):
    """Walk extractor on a graph whose size N is not a power of d.

    Requires ``d**m < N <= d**m_prime``.  The seed is split as
    ``(choice1, walk, choice3)`` where the two choices select preimages of
    the Mod maps uniformly: each choice range is a common multiple of all
    preimage-set sizes.
    """

    def __init__(self, graph, d, n, m, m_prime):
        N = graph.N
        if graph.d != d:
            raise DomainError("graph degree must equal the alphabet size")
        if not d**m < N <= d**m_prime:
            raise DomainError(f"need d^m < N <= d^m' (got {d**m}, {N}, {d**m_prime})")
        if not m_prime < n:
            raise DomainError("need m' < n")
        self.graph = graph
        self.d, self.n, self.m, self.m_prime = d, n, m, m_prime
        self.N = N
        self.walk_len = n - m_prime
        self.choice1 = mod_choice_space(N, d**m)
        self.choice3 = mod_choice_space(d**m_prime, N)
        self.seed_space = self.choice1 * d**self.walk_len * self.choice3

    def __repr__(self):
        return (f"RoundedSfextParams({self.graph.name}, d={self.d}, n={self.n}, "
                f"m={self.m}, m'={self.m_prime})")

    def extract(self, y):
        y = _check_string(y, self.d, self.n)
        u = codec.from_digits(y[: self.m_prime], self.d)
        start = mod_map(self.d**self.m_prime, self.N, u + 1) - 1
        end = walk(self.graph, start, y[self.m_prime:])
        out = mod_map(self.N, self.d**self.m, end + 1) - 1
        return codec.to_digits(out, self.d, self.m)

    def split_seed(self, z):
        z, c3 = divmod(z, self.choice3)
        c1, widx = divmod(z, self.d**self.walk_len)
        return c1, codec.to_digits(widx, self.d, self.walk_len), c3

    def invert(self, x, z):
        x = _check_string(x, self.d, self.m)
        c1, fresh, c3 = self.split_seed(z)
        pre1 = mod_preimages(self.N, self.d**self.m, codec.from_digits(x, self.d) + 1)
        x1 = pre1[c1 % len(pre1)] - 1
        inv = self.graph.inverse_labels
        if inv is not None:
            # walk forward on fresh labels, then replay the inverse labels backwards
            x2 = walk(self.graph, x1, fresh)
            w = tuple(inv[t] for t in reversed(fresh))
        else:
            w = fresh
            x2 = walk_inverse(self.graph, x1, w)
        pre3 = mod_preimages(self.d**self.m_prime, self.N, x2 + 1)
        u = pre3[c3 % len(pre3)] - 1
        return codec.to_digits(u, self.d, self.m_prime) + w

    def linf_bound(self):
        """Two-stage composition of the Mod-inverter ℓ∞ bound, scaled to [d]^n."""
        dm, dmp, N = self.d**self.m, self.d**self.m_prime, self.N
        a1 = mod_inverter_linf_bound(N, dm, 0)
        if dmp == N:
            a3 = a1 * N / dmp
        else:
            a3 = mod_inverter_linf_bound(dmp, N, a1 * N)
        return a3 / self.d**self.walk_len

    def inverter_linf(self):
        """Exact ℓ∞ distance of the inverter output from uniform."""
        counts = self.inverter_counts()
        total = int(counts.sum())
        size = counts.size
        return Fraction(int(np.abs(counts * size - total).max()), total * size)


def rounded_extract(p, y):
    return p.extract(y)


def rounded_invert(p, x, rng):
    return p.sample(x, rng)


# ---------------------------------------------------------------------------
# Rate


@dataclass(frozen=True)
class WalkRate:
    rate: float
    alpha: float
    k: float | None = None
    m: float | None = None


def walk_rate(delta, d, lam, gamma=0.0, n=None):
    """max{α(1-δ), 1 - δ/α} - γ with α = -log_d λ²."""
    if not 0 <= delta < 1:
        raise DomainError("need 0 <= delta < 1")
    if not 0 < lam < 1:
        raise DomainError("need 0 < lambda < 1")
    if d < 2:
        raise DomainError("need d >= 2")
    alpha = -math.log(lam * lam, d)
    rate = max(alpha * (1 - delta), 1 - delta / alpha) - gamma
    k = m = None
    if n is not None:
        k = (1 - delta) * n
        m = n * rate
    return WalkRate(rate, alpha, k, m)
