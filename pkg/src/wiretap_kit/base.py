"""The invertible-extractor interface shared by every construction."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from . import codec
from .config import check_cap


class InvertibleExtractor:
    """A map ``Σ^n -> Σ^m`` paired with a preimage sampler.

    Subclasses set ``d``, ``n``, ``m`` and ``seed_space`` and implement
    :meth:`extract` and :meth:`invert`.  The inverter's randomness is a
    single integer ``z`` drawn uniformly from ``range(seed_space)``, so
    every exact check can enumerate it.
    """

    d: int
    n: int
    m: int
    seed_space: int

    def extract(self, y):
        raise NotImplementedError

    def invert(self, x, z):
        raise NotImplementedError

    def sample(self, x, rng):
        return self.invert(tuple(x), int(rng.integers(0, self.seed_space)))

    def extract_table(self):
        """Output index (big-endian) for every input index."""
        size = check_cap(self.d**self.n)
        out = np.empty(size, dtype=np.int64)
        for i in range(size):
            out[i] = codec.from_digits(self.extract(codec.to_digits(i, self.d, self.n)), self.d)
        return out

    def inverter_counts(self):
        """How often each output string is hit as (x, z) ranges over everything."""
        check_cap(self.d**self.m * self.seed_space)
        counts = np.zeros(self.d**self.n, dtype=np.int64)
        for x in itertools.product(range(self.d), repeat=self.m):
            for z in range(self.seed_space):
                counts[codec.from_digits(self.invert(x, z), self.d)] += 1
        return counts

    def inverter_distance(self):
        """Exact δ(A(U, U), U) of the inverter."""
        counts = self.inverter_counts()
        total = int(counts.sum())
        size = counts.size
        return Fraction(int(np.abs(counts * size - total).sum()), 2 * total * size)
