"""Strong linear seeded extractors over GF(2).

Vectors and seeds are packed integers (see :mod:`wiretap_kit.gf`); a
matrix is a list of ``m`` row integers of ``n`` bits.  The public functions
also accept bit tuples for inputs and outputs.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property

import numpy as np

from . import kernels
from .errors import DomainError, ShapeMismatch
from .gf import gf2_combination, gf2_kernel, gf2_matvec, gf2_rank, gf2_solve, pack_row, unpack_row


class LinearSeededExtractor:
    """Seed ``z`` in ``range(2**t)`` selects an ``m x n`` matrix over GF(2).

    Seeds whose matrix is not surjective are replaced by the projection onto
    the first m coordinates; :attr:`fallback_seeds` lists them.
    """

    def __init__(self, n, t, m, matrices, tag="custom"):
        if not 0 < m <= n:
            raise DomainError("need 0 < m <= n")
        matrices = [list(rows) for rows in matrices]
        if len(matrices) != 1 << t:
            raise DomainError(f"need {1 << t} matrices for seed length {t}")
        for rows in matrices:
            if len(rows) != m or any(not 0 <= r < 1 << n for r in rows):
                raise DomainError("matrix has the wrong shape")
        self.n, self.t, self.m = n, t, m
        self.tag = tag
        self._raw = matrices
        projection = [1 << (n - 1 - i) for i in range(m)]
        self._effective = []
        self.fallback_seeds = []
        for z, rows in enumerate(matrices):
            if gf2_rank(rows, n) == m:
                self._effective.append(rows)
            else:
                self._effective.append(projection)
                self.fallback_seeds.append(z)
        self._kernels = {}

    def __repr__(self):
        return f"LinearSeededExtractor({self.tag}, n={self.n}, t={self.t}, m={self.m})"

    @property
    def seeds(self):
        return range(1 << self.t)

    def raw_matrix(self, z):
        return list(self._raw[z])

    def matrix(self, z):
        return self._effective[z]

    @property
    def fallback_fraction(self):
        return Fraction(len(self.fallback_seeds), 1 << self.t)

    def apply(self, x, z):
        """Packed ``M_z x`` with the effective matrix."""
        return gf2_matvec(self._effective[z], x)

    def apply_batch(self, xs, z):
        return kernels.gf2_apply(np.array(self._effective[z], dtype=np.uint64), xs).astype(np.int64)

    def kernel(self, z):
        if z not in self._kernels:
            self._kernels[z] = gf2_kernel(self._effective[z], self.n)
        return self._kernels[z]

    def preimage(self, y, z, coeffs):
        """The point of the coset ``M_z^{-1}(y)`` selected by ``coeffs``."""
        part, _ = gf2_solve(self._effective[z], y, self.n)
        return part ^ gf2_combination(self.kernel(z), coeffs)

    @cached_property
    def coset_bits(self):
        return self.n - self.m

    def invert_seeded(self, y, r):
        """Deterministic inverter: ``r`` packs the seed (high bits) and coset coefficients."""
        z, coeffs = divmod(r, 1 << self.coset_bits)
        return z, self.preimage(y, z, coeffs)

    @property
    def inverter_seed_space(self):
        return 1 << (self.t + self.coset_bits)


def _as_packed(v, length):
    if isinstance(v, (int, np.integer)):
        v = int(v)
        if not 0 <= v < 1 << length:
            raise ShapeMismatch(f"value does not fit in {length} bits")
        return v
    v = tuple(v)
    if len(v) != length:
        raise ShapeMismatch(f"expected {length} bits, got {len(v)}")
    return pack_row(v)


def effective_matrix(E, z):
    """(rows as bit tuples, fallback_used)."""
    z = _as_packed(z, E.t)
    return [unpack_row(r, E.n) for r in E.matrix(z)], z in E.fallback_seeds


def lse_extract(E, x, z):
    x = _as_packed(x, E.n)
    z = _as_packed(z, E.t)
    return unpack_row(E.apply(x, z), E.m)


def lse_invert(E, y, rng):
    """Sample (seed, x) with ``lse_extract(E, x, seed) == y``; both as bit tuples."""
    y = _as_packed(y, E.m)
    z, x = E.invert_seeded(y, int(rng.integers(0, E.inverter_seed_space)))
    return unpack_row(z, E.t), unpack_row(x, E.n)


# ---------------------------------------------------------------------------
# Families


def _toeplitz_rows(v, n, m):
    # T[i][j] = v[i - j + n - 1]; v is a list of n+m-1 bits
    return [pack_row([v[i - j + n - 1] for j in range(n)]) for i in range(m)]


def toeplitz_family(n, m, t=None, master_seed=0):
    """Toeplitz hashing.  With ``t = n + m - 1`` (default) the seed is the
    whole diagonal vector; with a shorter ``t`` the seed fills the first t
    diagonals and the rest come from ``master_seed``.
    """
    full = n + m - 1
    if not 0 < m <= n:
        raise DomainError("need 0 < m <= n")
    t = full if t is None else t
    if not 0 < t <= full:
        raise DomainError(f"seed length must lie in [1, {full}]")
    tail = np.random.default_rng(master_seed).integers(0, 2, full - t).tolist()
    mats = []
    for z in range(1 << t):
        v = list(unpack_row(z, t)) + tail
        mats.append(_toeplitz_rows(v, n, m))
    tag = "toeplitz" if t == full else f"toeplitz[t={t}]"
    return LinearSeededExtractor(n, t, m, mats, tag=tag)


def random_family(n, m, t, master_seed):
    """2**t fixed random matrices drawn from ``master_seed``."""
    if not 0 < m <= n:
        raise DomainError("need 0 < m <= n")
    rng = np.random.default_rng(master_seed)
    mats = [[pack_row(row) for row in rng.integers(0, 2, (m, n))] for _ in range(1 << t)]
    return LinearSeededExtractor(n, t, m, mats, tag="random-family")


def projection_family(n, m, t=1):
    """Every seed maps to the projection onto the first m coordinates."""
    proj = [1 << (n - 1 - i) for i in range(m)]
    return LinearSeededExtractor(n, t, m, [proj] * (1 << t), tag="projection")


# ---------------------------------------------------------------------------
# Measurement


def _points_packed(source, n):
    if hasattr(source, "points"):
        if source.d != 2 or source.n != n:
            raise ShapeMismatch("source must live on GF(2)^n")
        return np.array([pack_row(p) for p in source.points()], dtype=np.uint64)
    return np.asarray(source, dtype=np.uint64)


def seedwise_distances(E, source):
    """δ(M_z X, U_m) for every seed z, exactly.

    ``source`` is a binary :class:`SourceDescriptor` or an array of packed
    points (uniform over the array, repeats counted).
    """
    pts = _points_packed(source, E.n)
    size = len(pts)
    nout = 1 << E.m
    out = []
    for z in E.seeds:
        counts = np.bincount(E.apply_batch(pts, z), minlength=nout)
        out.append(Fraction(int(np.abs(counts * nout - size).sum()), 2 * size * nout))
    return out


def strongness_of(E, source):
    """δ((E(X, Z), Z), U_{m+t}), which is the seed-average of the per-seed distances."""
    dists = seedwise_distances(E, source)
    return sum(dists, Fraction(0)) / len(dists)


def strongness_measure(E, sources):
    """Maximum over sources of the strong-extractor distance."""
    return max((strongness_of(E, s) for s in sources), default=Fraction(0))


def seed_threshold(dists):
    """Smallest ε with Pr_z[δ_z > ε] <= ε (all but an ε fraction of seeds are ε-good)."""
    total = len(dists)
    candidates = sorted(set(dists) | {Fraction(0)})
    for eps in candidates:
        bad = sum(1 for v in dists if v > eps)
        if Fraction(bad, total) <= eps:
            return eps
        # between candidates the bad count is constant; the smallest ε that
        # satisfies the fraction condition may lie strictly inside the gap
        if Fraction(bad, total) < min((c for c in candidates if c > eps), default=Fraction(2)):
            return Fraction(bad, total)
    return Fraction(1)
