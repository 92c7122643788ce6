"""Outer error-correcting codes, linear observations and the side-channel protocol."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import codec
from .affext import _is_affine_set
from .config import check_cap
from .errors import DomainError, NoSolution, ShapeMismatch, TooManyErrors
from .gf import field, pack_row, rank, rref, solve_affine, unpack_row
from .linext import LinearSeededExtractor, seed_threshold, seedwise_distances
from .wiretap import (
    WiretapProtocol,
    conditional_profile,
    frac_str,
    observation_counts,
    _digits_array,
)


# ---------------------------------------------------------------------------
# Codes


def _invert_matrix(F, A):
    A = np.asarray(A, dtype=np.int64)
    k = A.shape[0]
    aug = np.concatenate([A, np.eye(k, dtype=np.int64)], axis=1)
    R, pivots = rref(F, aug)
    if list(pivots[:k]) != list(range(k)):
        raise DomainError("matrix is singular")
    return np.asarray(R)[:k, k:]


class LinearCode:
    """Systematic linear code: ``codeword = message @ G`` with ``G = [I_K | P]``."""

    def __init__(self, q, generator, kind, decoder=None, min_distance=None):
        self.F = field(q)
        self.q = q
        G = np.asarray(generator, dtype=np.int64)
        self.K, self.N = G.shape
        if rank(self.F, G) != self.K:
            raise DomainError("generator must have full row rank")
        if not np.array_equal(G[:, :self.K], np.eye(self.K, dtype=np.int64)):
            raise DomainError("generator must be systematic")
        self.G = G
        self.kind = kind
        self._decoder = decoder
        self.min_distance = min_distance

    def __repr__(self):
        return f"LinearCode({self.kind}, q={self.q}, N={self.N}, K={self.K})"

    @property
    def radius(self):
        return (self.min_distance - 1) // 2

    @property
    def rate(self):
        return Fraction(self.K, self.N)

    def encode(self, msg):
        msg = np.asarray(msg, dtype=np.int64)
        if msg.shape != (self.K,):
            raise ShapeMismatch(f"message must have {self.K} symbols")
        return tuple(int(v) for v in self.F.matvec(self.G.T, msg))

    def decode(self, word):
        word = tuple(int(v) for v in word)
        if len(word) != self.N:
            raise ShapeMismatch(f"word must have {self.N} symbols")
        return self._decoder(self, word)

    def to_json(self):
        return {"kind": self.kind, "N": self.N, "K": self.K, "q": self.q}


def _hamming_decode(C, word):
    F = C.F
    s = tuple(int(v) for v in F.matvec(C.H, np.array(word)))
    w = list(word)
    if any(s):
        cols = [tuple(int(v) for v in C.H[:, j]) for j in range(C.N)]
        if s not in cols:
            raise TooManyErrors("syndrome matches no single-bit error")
        w[cols.index(s)] ^= 1
    return tuple(w[:C.K])


def hamming74():
    P = np.array([[1, 1, 0], [1, 0, 1], [0, 1, 1], [1, 1, 1]], dtype=np.int64)
    G = np.concatenate([np.eye(4, dtype=np.int64), P], axis=1)
    C = LinearCode(2, G, "hamming", decoder=_hamming_decode, min_distance=3)
    C.H = np.concatenate([P.T, np.eye(3, dtype=np.int64)], axis=1)
    return C


def _poly_eval(F, coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = F.add(F.mul(acc, x), c)
    return acc


def _poly_divmod(F, num, den):
    num = list(num)
    while den and den[-1] == 0:
        den = den[:-1]
    quot = [0] * max(1, len(num) - len(den) + 1)
    lead_inv = F.inv(den[-1])
    for i in range(len(num) - len(den), -1, -1):
        c = F.mul(num[i + len(den) - 1], lead_inv)
        quot[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] = F.sub(num[i + j], F.mul(c, d))
    return quot, num[: len(den) - 1]


def _rs_decode(C, word):
    F, N, K = C.F, C.N, C.K
    e = (N - K) // 2
    pts = C.points
    # unknowns: Q_0..Q_{e+K-1}, E_0..E_{e-1}; E is monic of degree e
    rows, rhs = [], []
    for a, r in zip(pts, word):
        powers = [F.pow(a, j) for j in range(e + K)]
        row = powers + [F.neg(F.mul(r, powers[j])) for j in range(e)]
        rows.append(row)
        rhs.append(F.mul(r, F.pow(a, e)))
    try:
        sol = solve_affine(F, rows, rhs)
    except NoSolution:
        raise TooManyErrors("no error locator fits the received word") from None
    v = list(sol.particular)
    Q = v[: e + K]
    E = v[e + K:] + [1]
    P, rem = _poly_divmod(F, Q, E)
    if any(rem) or any(P[K:]):
        raise TooManyErrors("received word is outside the decoding radius")
    P = (P + [0] * K)[:K]
    code = [_poly_eval(F, P, a) for a in pts]
    if sum(1 for a, b in zip(code, word) if a != b) > e:
        raise TooManyErrors("received word is outside the decoding radius")
    return tuple(int(c) for c in code[:K])


def reed_solomon(N, K, q):
    """RS code evaluated at ``alpha**0 .. alpha**(N-1)``, made systematic."""
    F = field(q)
    if not 0 < K <= N <= q - 1:
        raise DomainError("need 0 < K <= N <= q - 1")
    if F.kind == "binary":
        pts = [int(F._exp[i]) for i in range(N)]
    else:
        g = next(g for g in range(2, q) if len({pow(g, i, q) for i in range(q - 1)}) == q - 1) if q > 2 else 1
        pts = [pow(g, i, q) for i in range(N)]
    V = np.array([[F.pow(a, j) for a in pts] for j in range(K)], dtype=np.int64)
    G = F.matmul(_invert_matrix(F, V[:, :K]), V)
    C = LinearCode(q, G, "reed-solomon", decoder=_rs_decode, min_distance=N - K + 1)
    C.points = pts
    return C


def code_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    kind = obj["kind"]
    if kind == "hamming":
        C = hamming74()
        if (obj.get("N", 7), obj.get("K", 4), obj.get("q", 2)) != (7, 4, 2):
            raise DomainError("only Hamming(7,4) over GF(2) is provided")
        return C
    if kind == "reed-solomon":
        return reed_solomon(obj["N"], obj["K"], obj["q"])
    raise DomainError(f"unknown code kind {kind!r}")


# ---------------------------------------------------------------------------
# Composition (the protocol output is cut into K-symbol blocks)


def _blocks(P, C):
    if P.q != C.q:
        raise ShapeMismatch("protocol and code use different alphabets")
    if P.n % C.K:
        raise ShapeMismatch(f"block length {P.n} is not a multiple of {C.K}")
    return P.n // C.K


def code_encode(C, y, blocks):
    out = ()
    for b in range(blocks):
        out += C.encode(y[b * C.K:(b + 1) * C.K])
    return out


def code_decode(C, word, blocks):
    out = ()
    for b in range(blocks):
        out += C.decode(word[b * C.N:(b + 1) * C.N])
    return out


def compose_encode(P, C, x, rng):
    b = _blocks(P, C)
    return code_encode(C, P.encode_raw(x, int(rng.integers(0, P.seed_space))), b)


def compose_decode(C, P, word):
    b = _blocks(P, C)
    if len(word) != b * C.N:
        raise ShapeMismatch(f"expected {b * C.N} symbols")
    return P.decode_raw(code_decode(C, tuple(word), b))


def composed_protocol(P, C):
    """The protocol ``C . P`` with decoder ``P^-1 . C^-1``."""
    b = _blocks(P, C)
    return WiretapProtocol(
        P.q, P.m, b * C.N, P.seed_space,
        encoder=lambda x, z: code_encode(C, P.encode_raw(x, z), b),
        decoder=lambda w: P.decode_raw(code_decode(C, w, b)),
        targets=(P.t, P.eps, P.gamma), name=f"{P.name}+{C.kind}",
        params={**P.params, "code": C.to_json(), "rate": frac_str(P.rate * C.rate)},
    )


@dataclass
class LinearObservationReport:
    rank: int
    profile: list
    max_distance: Fraction
    declared_epsilon: Fraction
    affine_conditionals: bool
    min_conditional_dim: int

    @property
    def within_declared(self):
        return self.max_distance <= self.declared_epsilon

    def to_json(self):
        return {
            "rank": self.rank,
            "max_distance": frac_str(self.max_distance),
            "declared_epsilon": frac_str(self.declared_epsilon),
            "within_declared": self.within_declared,
            "affine_conditionals": self.affine_conditionals,
            "min_conditional_dim": self.min_conditional_dim,
            "observations": [[o.w, frac_str(o.mass), frac_str(o.distance)] for o in self.profile],
        }


def linear_observation_report(P, C, L):
    """Exact message distances given ``L @ codeword`` for every observation.

    Over GF(2) it also checks that, for each observation, the protocol
    output seen by the decoder is uniform on an affine subspace.
    """
    b = _blocks(P, C)
    F = C.F
    L = np.asarray(L, dtype=np.int64).reshape(-1, b * C.N)
    M = P.q**P.m
    check_cap(M * P.seed_space)
    tab = np.asarray(P.encode_table())
    ys = _digits_array(tab, P.q, P.n)
    # observations are computed on the encoded words
    keys = np.empty(tab.shape, dtype=np.int64)
    cache = {}
    for idx in np.ndindex(tab.shape):
        yi = int(tab[idx])
        if yi not in cache:
            word = code_encode(C, tuple(int(v) for v in ys[idx]), b)
            obs = F.matvec(L, np.array(word)) if L.shape[0] else np.zeros(0, dtype=np.int64)
            cache[yi] = codec.from_digits([int(v) for v in obs], P.q)
        keys[idx] = cache[yi]
    nkeys = P.q ** L.shape[0]
    counts = observation_counts(P, keys, nkeys)
    profile = conditional_profile(counts)
    affine_ok, min_dim = True, P.n
    if P.q == 2:
        for w in np.unique(keys):
            ys_w = tab[keys == w].tolist()
            hist = np.bincount(ys_w)
            hist = hist[hist > 0]
            ok, r = _is_affine_set(set(ys_w), P.n)
            affine_ok &= ok and hist.min() == hist.max()
            min_dim = min(min_dim, r)
    return LinearObservationReport(
        rank=rank(F, L) if L.shape[0] else 0,
        profile=profile,
        max_distance=max(o.distance for o in profile),
        declared_epsilon=P.eps,
        affine_conditionals=affine_ok,
        min_conditional_dim=min_dim,
    )


def random_observation(q, rows, cols, rng, max_rank=None):
    """A random ``rows x cols`` matrix over GF(q) of rank at most ``max_rank``."""
    F = field(q)
    max_rank = rows if max_rank is None else max_rank
    while True:
        L = rng.integers(0, q, (rows, cols))
        if rank(F, L) <= max_rank:
            return L


# ---------------------------------------------------------------------------
# Side-channel protocol


class SideChannelProtocol:
    """Main channel carries a preimage, the side channel carries the seed."""

    def __init__(self, E: LinearSeededExtractor):
        self.E = E
        self.n, self.m, self.t = E.n, E.m, E.t

    def __repr__(self):
        return f"SideChannelProtocol({self.E!r})"

    def encode_seeded(self, x, r):
        z, main = self.E.invert_seeded(pack_row(x), r)
        return unpack_row(main, self.n), unpack_row(z, self.t)

    def decode(self, main, side):
        main, side = tuple(main), tuple(side)
        if len(main) != self.n or len(side) != self.t:
            raise ShapeMismatch("main/side lengths do not match the extractor")
        return unpack_row(self.E.apply(pack_row(main), pack_row(side)), self.m)


def general_encode(P, x, rng):
    x = tuple(x)
    if len(x) != P.m:
        raise ShapeMismatch(f"message must have {P.m} bits")
    return P.encode_seeded(x, int(rng.integers(0, P.E.inverter_seed_space)))


def general_decode(P, main, side):
    return P.decode(main, side)


class GeneralAdversary:
    """Truth tables for the main-channel and side-channel observation functions."""

    def __init__(self, c1, c2, c1_bits, c2_bits):
        self.c1 = np.asarray(c1, dtype=np.int64)
        self.c2 = np.asarray(c2, dtype=np.int64)
        self.c1_bits, self.c2_bits = c1_bits, c2_bits
        for tab, bits in ((self.c1, c1_bits), (self.c2, c2_bits)):
            if tab.ndim != 1 or tab.size & (tab.size - 1):
                raise DomainError("truth tables need a power-of-two number of entries")
            if tab.size and (tab.min() < 0 or tab.max() >= 1 << bits):
                raise DomainError("truth table entry exceeds its declared width")

    @property
    def t(self):
        return self.c1_bits + self.c2_bits

    @staticmethod
    def _hex(tab, bits):
        width = max(1, -(-bits // 4))
        return "".join(f"{int(v):0{width}x}" for v in tab)

    @staticmethod
    def _unhex(text, bits):
        width = max(1, -(-bits // 4))
        if len(text) % width:
            raise DomainError("hex truth table has a ragged length")
        return [int(text[i:i + width], 16) for i in range(0, len(text), width)]

    def to_json(self):
        return {"c1": self._hex(self.c1, self.c1_bits), "c2": self._hex(self.c2, self.c2_bits),
                "c1_bits": self.c1_bits, "c2_bits": self.c2_bits, "t": self.t}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        A = cls(cls._unhex(obj["c1"], obj["c1_bits"]), cls._unhex(obj["c2"], obj["c2_bits"]),
                obj["c1_bits"], obj["c2_bits"])
        if obj.get("t", A.t) != A.t:
            raise DomainError("t differs from c1_bits + c2_bits")
        return A


def projection_adversary(n, t, bits):
    """Main channel: the first ``bits`` bits; side channel: the whole seed."""
    xs = np.arange(1 << n)
    return GeneralAdversary(xs >> (n - bits), np.arange(1 << t), bits, t)


def parity_adversary(n, t, bits):
    """Main channel: parities of ``bits`` consecutive blocks; side channel: the seed."""
    xs = np.arange(1 << n, dtype=np.int64)
    width = n // bits
    out = np.zeros_like(xs)
    for b in range(bits):
        mask = ((1 << width) - 1) << (n - (b + 1) * width)
        out = (out << 1) | (np.bitwise_count((xs & mask).astype(np.uint64)) & 1).astype(np.int64)
    return GeneralAdversary(out, np.arange(1 << t), bits, t)


def decoder_probe_adversary(E, guess=0):
    """Main channel: the decoder's output under a guessed seed; side channel: the seed."""
    xs = np.arange(1 << E.n, dtype=np.int64)
    return GeneralAdversary(E.apply_batch(xs, guess), np.arange(1 << E.t), E.m, E.t)


@dataclass
class AdversaryReport:
    epsilon: Fraction            # seed-wise threshold over good main observations
    strongness: Fraction         # max over good observations of the seed-averaged distance
    leakage: Fraction            # Pr[view leaves X farther than epsilon from uniform]
    classifier_mass: Fraction    # Pr[main observation has few preimages]
    threshold: float
    max_distance: Fraction

    @property
    def leakage_bounded(self):
        return self.leakage <= self.classifier_mass + self.epsilon

    def to_json(self):
        return {"epsilon": frac_str(self.epsilon), "strongness": frac_str(self.strongness),
                "leakage": frac_str(self.leakage), "classifier_mass": frac_str(self.classifier_mass),
                "threshold": self.threshold, "max_distance": frac_str(self.max_distance),
                "leakage_bounded": self.leakage_bounded}


def general_adversary_report(P, A, alpha=Fraction(1, 8), delta=None):
    """Exact conditional message distributions given ``(C1(main), C2(side))``.

    Main and side are jointly uniform (the inverter is perfect), so the
    message is ``E_z(main)``.  A main observation is bad when it has fewer
    than ``2**(n (1 - delta - alpha))`` preimages; ``delta`` defaults to the
    main-channel share ``c1_bits / n``.
    """
    E = P.E
    n, t = E.n, E.t
    if A.c1.size != 1 << n or A.c2.size != 1 << t:
        raise ShapeMismatch("truth tables do not match the channel lengths")
    check_cap((1 << n) * (1 << t))
    delta = Fraction(A.c1_bits, n) if delta is None else Fraction(delta)
    threshold = 2.0 ** (n * (1 - float(delta) - float(alpha)))
    xs = np.arange(1 << n, dtype=np.int64)
    pre = np.bincount(A.c1, minlength=1 << A.c1_bits)
    bad_o1 = {int(o) for o in np.nonzero(pre)[0] if pre[o] < threshold}
    classifier_mass = Fraction(int(sum(pre[o] for o in bad_o1)), 1 << n)

    M = 1 << E.m
    n2 = 1 << A.c2_bits
    outs = np.stack([E.apply_batch(xs, z) for z in range(1 << t)])  # [z, main]
    # counts[o1, o2, x]
    key = (A.c1[None, :] * n2 + A.c2[:, None]) * M + outs
    counts = np.bincount(key.ravel(), minlength=(1 << A.c1_bits) * n2 * M).reshape(-1, M)
    total = (1 << n) * (1 << t)
    dist = {}
    for row in np.nonzero(counts.sum(axis=1))[0]:
        c = counts[row]
        tot = int(c.sum())
        dist[int(row)] = (Fraction(tot, total), Fraction(int(np.abs(c * M - tot).sum()), 2 * tot * M))

    eps, strong = Fraction(0), Fraction(0)
    for o1 in np.nonzero(pre)[0]:
        if int(o1) in bad_o1:
            continue
        pts = xs[A.c1 == o1].astype(np.uint64)
        per_seed = seedwise_distances(E, pts)
        eps = max(eps, seed_threshold(per_seed))
        strong = max(strong, sum(per_seed, Fraction(0)) / len(per_seed))
    leakage = sum((p for p, d in dist.values() if d > eps), Fraction(0))
    return AdversaryReport(eps, strong, leakage, classifier_mass, threshold,
                           max(d for _, d in dist.values()))
