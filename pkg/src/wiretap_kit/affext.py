"""Seedless affine extractors, the seeded/seedless composition and its inverter.

All vectors are packed GF(2) integers (coordinate 0 is the top bit).  An
affine extractor is anything with ``n``, ``l`` and a ``table()`` giving the
packed output for every packed input.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import kernels
from .base import InvertibleExtractor
from .config import check_cap
from .dists import SourceDescriptor
from .errors import BoundViolation, DomainError, ShapeMismatch
from .gf import gf2_rank, pack_row, unpack_row
from .linext import LinearSeededExtractor


def _all_inputs(n):
    return np.arange(1 << n, dtype=np.int64)


# ---------------------------------------------------------------------------
# Quadratic forms


def _parity(v):
    return (np.bitwise_count(v.astype(np.uint64)) & 1).astype(np.int64)


class QuadraticForm:
    """``Q(x) = sum_{i<j} a_ij x_i x_j`` over GF(2); ``pairs`` lists the (i, j) with a_ij = 1."""

    def __init__(self, n, pairs):
        pairs = sorted({(min(i, j), max(i, j)) for i, j in pairs})
        if any(i == j or not 0 <= i < n or not 0 <= j < n for i, j in pairs):
            raise DomainError("pairs must be distinct coordinates in range")
        self.n = n
        self.pairs = tuple(pairs)

    def __repr__(self):
        return f"QuadraticForm(n={self.n}, pairs={list(self.pairs)})"

    @cached_property
    def rank(self):
        """Rank of the associated alternating bilinear form (always even)."""
        rows = [0] * self.n
        for i, j in self.pairs:
            rows[i] ^= 1 << (self.n - 1 - j)
            rows[j] ^= 1 << (self.n - 1 - i)
        return gf2_rank(rows, self.n)

    def __add__(self, other):
        return QuadraticForm(self.n, set(self.pairs) ^ set(other.pairs))

    def table(self):
        xs = _all_inputs(self.n)
        out = np.zeros_like(xs)
        for i, j in self.pairs:
            out ^= (xs >> (self.n - 1 - i)) & (xs >> (self.n - 1 - j)) & 1
        return out


def inner_product(n):
    """x0 x1 + x2 x3 + ...  (full rank for even n)."""
    return QuadraticForm(n, [(2 * i, 2 * i + 1) for i in range(n // 2)])


class QuadraticBank:
    """Each output bit is a fixed quadratic form; bit 0 is the top output bit."""

    provenance = "quadratic-bank"

    def __init__(self, forms):
        forms = list(forms)
        if not forms or len({f.n for f in forms}) != 1:
            raise DomainError("need at least one form, all on the same length")
        self.forms = forms
        self.n = forms[0].n
        self.l = len(forms)

    def __repr__(self):
        return f"QuadraticBank(n={self.n}, l={self.l})"

    @cached_property
    def _table(self):
        out = np.zeros(1 << self.n, dtype=np.int64)
        for f in self.forms:
            out = (out << 1) | f.table()
        out.setflags(write=False)
        return out

    def table(self):
        return self._table

    def evaluate(self, x):
        return int(self._table[x])

    def min_combined_rank(self):
        """Smallest rank over all nonzero GF(2) combinations of the forms."""
        best = self.n
        for r in range(1, self.l + 1):
            for combo in itertools.combinations(self.forms, r):
                total = combo[0]
                for f in combo[1:]:
                    total = total + f
                best = min(best, total.rank)
        return best


# Two forms on 6 variables whose every nonzero combination has full rank 6.
BANK6 = (
    ((0, 1), (2, 3), (4, 5)),
    ((0, 1), (0, 2), (1, 4), (3, 5)),
)


def quadratic_bank(n=6, l=2):
    """Default bank: inner product first, then the stored partner forms."""
    if n == 6 and l <= len(BANK6):
        return QuadraticBank([QuadraticForm(6, p) for p in BANK6[:l]])
    if l == 1:
        return QuadraticBank([inner_product(n)])
    raise DomainError("no stored bank for these parameters")


class ZeroExtractor:
    """The constant-zero map (useful as a degenerate component)."""

    provenance = "zero"

    def __init__(self, n, l):
        self.n, self.l = n, l

    def table(self):
        return np.zeros(1 << self.n, dtype=np.int64)

    def evaluate(self, x):
        return 0


# ---------------------------------------------------------------------------
# Lookup tables

_TABLE_LIMIT = 20


class LookupTableExtractor:
    """Explicit truth table on at most 2**20 inputs, optionally certified."""

    provenance = "lookup-table"

    def __init__(self, n, l, table, certification=None):
        if n > _TABLE_LIMIT:
            raise DomainError(f"lookup tables are limited to n <= {_TABLE_LIMIT}")
        table = np.asarray(table, dtype=np.int64)
        if table.shape != (1 << n,) or table.min() < 0 or table.max() >= 1 << l:
            raise DomainError("table has the wrong shape or range")
        self.n, self.l = n, l
        self._table = table
        self._table.setflags(write=False)
        self.certification = certification

    @classmethod
    def from_extractor(cls, ext):
        return cls(ext.n, ext.l, ext.table())

    @classmethod
    def random(cls, n, l, seed):
        return cls(n, l, np.random.default_rng(seed).integers(0, 1 << l, 1 << n))

    def table(self):
        return self._table

    def evaluate(self, x):
        return int(self._table[x])

    def certify(self, k):
        """Measure the error over all k-dimensional affine sources and record it."""
        eps = affine_error(self, self.n, k)
        self.certification = {"k": k, "epsilon": eps}
        return eps

    def _dtype(self):
        return np.dtype("<u1") if self.l <= 8 else np.dtype("<u2") if self.l <= 16 else np.dtype("<u4")

    def to_bytes(self):
        cert = None
        if self.certification is not None:
            eps = Fraction(self.certification["epsilon"])
            cert = {"k": self.certification["k"], "epsilon": f"{eps.numerator}/{eps.denominator}"}
        header = json.dumps({"n": self.n, "l": self.l, "certification": cert}, sort_keys=True)
        return header.encode() + b"\n" + self._table.astype(self._dtype()).tobytes()

    @classmethod
    def from_bytes(cls, data):
        head, sep, body = data.partition(b"\n")
        if not sep:
            raise DomainError("missing table header")
        meta = json.loads(head)
        n, l = meta["n"], meta["l"]
        probe = cls.__new__(cls)
        probe.l = l
        table = np.frombuffer(body, dtype=probe._dtype())
        if table.size != 1 << n:
            raise DomainError("table body has the wrong length")
        cert = meta.get("certification")
        if cert is not None:
            cert = {"k": cert["k"], "epsilon": Fraction(cert["epsilon"])}
        return cls(n, l, table.astype(np.int64), certification=cert)

    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


# ---------------------------------------------------------------------------
# Affine-source enumeration


def gaussian_binomial(n, k):
    num = den = 1
    for i in range(k):
        num *= (1 << (n - i)) - 1
        den *= (1 << (i + 1)) - 1
    return num // den


def affine_family_size(n, k):
    return gaussian_binomial(n, k) << (n - k)


def _subspaces_by_pivots(n, k):
    """Yield (span array of shape (S, 2**k), coset representatives) per pivot set.

    Subspaces are enumerated through their reduced row echelon bases; the
    representatives are all vectors supported on the non-pivot columns,
    which hit every coset exactly once.
    """
    for pivots in itertools.combinations(range(n), k):
        free = [(i, j) for i, p in enumerate(pivots) for j in range(p + 1, n) if j not in pivots]
        assign = np.arange(1 << len(free), dtype=np.int64)
        basis = np.empty((assign.size, k), dtype=np.int64)
        for i, p in enumerate(pivots):
            basis[:, i] = 1 << (n - 1 - p)
        for b, (i, j) in enumerate(free):
            bit = (assign >> (len(free) - 1 - b)) & 1
            basis[:, i] |= bit << (n - 1 - j)
        span = np.zeros((assign.size, 1 << k), dtype=np.int64)
        for c in range(1, 1 << k):
            low = c & -c
            i = k - low.bit_length()
            span[:, c] = span[:, c ^ low] ^ basis[:, i]
        others = [j for j in range(n) if j not in pivots]
        reps = np.zeros(1 << len(others), dtype=np.int64)
        for r in range(reps.size):
            reps[r] = sum(1 << (n - 1 - j) for b, j in enumerate(others)
                          if r >> (len(others) - 1 - b) & 1)
        yield pivots, span, reps


def affine_histograms(tables, nout, n, k):
    """Output histograms of each table on every k-dim affine source of GF(2)^n.

    Yields ``(span, reps, [hist per table])`` per pivot set; each histogram
    row ``s * len(reps) + r`` is the coset ``span[s] ^ reps[r]``.
    """
    if not 0 <= k <= n:
        raise DomainError("need 0 <= k <= n")
    check_cap(affine_family_size(n, k) * nout)
    for _, span, reps in _subspaces_by_pivots(n, k):
        yield span, reps, [kernels.coset_histograms(t, span, reps, nout) for t in tables]


def _max_distance(hist, size):
    nout = hist.shape[1]
    num = int(np.abs(hist * nout - size).sum(axis=1).max())
    return Fraction(num, 2 * size * nout)


def affine_error(ext, n=None, k=None):
    """Exact max over all k-dim affine sources of δ(ext(X), U)."""
    n = ext.n if n is None else n
    if n != ext.n:
        raise ShapeMismatch("extractor input length differs from n")
    if k is None:
        raise DomainError("k is required")
    worst = Fraction(0)
    nout = 1 << ext_output_bits(ext)
    for _, _, (hist,) in affine_histograms([ext.table()], nout, n, k):
        worst = max(worst, _max_distance(hist, 1 << k))
    return worst


def ext_output_bits(ext):
    return ext.m if hasattr(ext, "m") and not hasattr(ext, "l") else ext.l


def max_bias_on_affine(table, n, k):
    """Max |E(-1)^f| of a Boolean table over all k-dim affine sources."""
    worst = Fraction(0)
    for _, _, (hist,) in affine_histograms([table], 2, n, k):
        worst = max(worst, Fraction(int(np.abs(hist[:, 0] - hist[:, 1]).max()), 1 << k))
    return worst


# ---------------------------------------------------------------------------
# Composition


class InvertibleAffineExtractor(InvertibleExtractor):
    """``D(s, x) = E(x, s xor A(x)|_t)`` with input packed as ``s`` (top t bits) then ``x``.

    The inverter seed packs ``(z, c)``: ``z`` is a uniform seed of ``E`` and
    ``c`` picks a point of the solution coset of ``E_z(x) = y``.
    """

    d = 2

    def __init__(self, A, E: LinearSeededExtractor):
        if A.n != E.n:
            raise ShapeMismatch("affine extractor and seeded extractor disagree on input length")
        if A.l < E.t:
            raise DomainError("affine extractor output is shorter than the seed")
        self.A, self.E = A, E
        self.t, self.n_data, self.m = E.t, E.n, E.m
        self.n = self.t + self.n_data
        self.seed_space = E.inverter_seed_space

    def __repr__(self):
        return f"InvertibleAffineExtractor(t={self.t}, n'={self.n_data}, m={self.m})"

    def seed_part(self, x):
        return self.A.evaluate(x) >> (self.A.l - self.t)

    def forward(self, s, x):
        return self.E.apply(x, s ^ self.seed_part(x))

    def backward(self, y, r):
        z, x = self.E.invert_seeded(y, r)
        return z ^ self.seed_part(x), x

    def extract(self, y):
        y = tuple(y)
        if len(y) != self.n:
            raise ShapeMismatch(f"expected {self.n} bits")
        v = pack_row(y)
        return unpack_row(self.forward(v >> self.n_data, v & ((1 << self.n_data) - 1)), self.m)

    def invert(self, x, z):
        x = tuple(x)
        if len(x) != self.m:
            raise ShapeMismatch(f"expected {self.m} bits")
        s, data = self.backward(pack_row(x), z)
        return unpack_row((s << self.n_data) | data, self.n)

    @cached_property
    def _table(self):
        nd = self.n_data
        xs = _all_inputs(nd)
        a = self.A.table() >> (self.A.l - self.t)
        per_seed = np.stack([self.E.apply_batch(xs, z) for z in self.E.seeds])
        s = np.arange(1 << self.t, dtype=np.int64)
        out = per_seed[s[:, None] ^ a[None, :], xs[None, :]].reshape(-1)
        out.setflags(write=False)
        return out

    def table(self):
        return self._table

    def extract_table(self):
        return np.array(self._table)

    def inverter_counts(self):
        counts = np.zeros(1 << self.n, dtype=np.int64)
        for y in range(1 << self.m):
            for r in range(self.seed_space):
                s, x = self.backward(y, r)
                counts[(s << self.n_data) | x] += 1
        return counts


def iaext_extract(I, bits):
    return I.extract(bits)


def iaext_invert(I, y, rng):
    return I.sample(y, rng)


class _SeedPartExtractor:
    """``F(s, x) = s xor A(x)|_t`` as a seedless extractor on t + n' bits."""

    provenance = "composed-seed"

    def __init__(self, I):
        self.n, self.l = I.n, I.t
        s = np.arange(1 << I.t, dtype=np.int64)
        a = I.A.table() >> (I.A.l - I.t)
        self._table = (s[:, None] ^ a[None, :]).reshape(-1)

    def table(self):
        return self._table


class _DataSeededExtractor:
    """``E'((s, x), z) = E(x, z)``: the seeded extractor lifted to ignore ``s``."""

    def __init__(self, I):
        self.n, self.t, self.m = I.n, I.t, I.m
        xs = _all_inputs(I.n_data)
        reps = 1 << I.t
        self._tables = [np.tile(I.E.apply_batch(xs, z), reps) for z in I.E.seeds]

    def table(self, z):
        return self._tables[z]


def shaltiel_pieces(I):
    """The seedless part F and the lifted seeded part E' of an iaext instance."""
    return _SeedPartExtractor(I), _DataSeededExtractor(I)


def _is_affine_set(points, n):
    points = list(points)
    if not points:
        return True, -1
    base = points[0]
    diffs = [p ^ base for p in points]
    r = gf2_rank(diffs, n)
    if len(set(points)) != 1 << r:
        return False, r
    return True, r


def closedness_check(seeded, family, sample=None):
    """Conditioning an affine source on one seeded output keeps it affine.

    ``seeded`` exposes ``tables`` (one per seed) via ``table(z)`` and ``t``.
    ``family`` is a list of affine :class:`SourceDescriptor`.  Returns the
    smallest conditioned dimension observed; raises :class:`BoundViolation`
    if any conditioned support fails to be an affine subspace.
    """
    smallest = None
    for src in family if sample is None else family[:sample]:
        pts = [pack_row(p) for p in src.points()]
        for z in range(1 << seeded.t):
            tab = seeded.table(z)
            groups = {}
            for p in pts:
                groups.setdefault(int(tab[p]), []).append(p)
            for grp in groups.values():
                ok, r = _is_affine_set(grp, src.n)
                if not ok:
                    raise BoundViolation("conditioned source is not affine")
                smallest = r if smallest is None else min(smallest, r)
    return smallest


def affine_family(n, k, limit=None):
    """Explicit k-dim affine sources of GF(2)^n as descriptors (in enumeration order)."""
    out = []
    for _, span, reps in _subspaces_by_pivots(n, k):
        for s in range(span.shape[0]):
            basis = [int(span[s, 1 << (k - 1 - i)]) for i in range(k)]
            for r in reps:
                out.append(SourceDescriptor.affine(2, [unpack_row(b, n) for b in basis],
                                                   unpack_row(int(r), n)))
                if limit is not None and len(out) >= limit:
                    return out
    return out


def shaltiel_check(I, k, closedness_sample=256):
    """Seedless-seed composition check on every k-dim affine source of GF(2)^n.

    Returns ``(measured, bound, vacuous, min_conditioned_dim)`` where
    ``measured`` is the max over sources of δ(E(X, F(X)), E(X, U_t)) and
    ``bound = eps * 2**(t + 3)`` with ``eps`` the affine error of F.
    """
    F, Ep = shaltiel_pieces(I)
    nout = 1 << I.m
    size = 1 << k
    tables = [I.table(), F.table()] + [Ep.table(z) for z in range(1 << I.t)]
    measured = Fraction(0)
    eps_f = Fraction(0)
    nt = 1 << I.t
    for _, _, hists in affine_histograms(tables, nout if nout >= nt else nt, I.n, k):
        h_d, h_f, *h_seeds = hists
        eps_f = max(eps_f, _max_distance(h_f[:, :nt], size))
        mix = sum(h_seeds)  # histogram of E'(X, U_t) scaled by 2**t
        num = int(np.abs(h_d[:, :nout] * nt - mix[:, :nout]).sum(axis=1).max())
        measured = max(measured, Fraction(num, 2 * size * nt))
    bound = float(eps_f) * 2.0 ** (I.t + 3)
    if measured > bound:
        raise BoundViolation(f"measured {measured} exceeds {bound}")
    family = affine_family(I.n, k, limit=closedness_sample)
    dim = closedness_check(Ep, family)
    return measured, bound, bound >= 1.0, dim
