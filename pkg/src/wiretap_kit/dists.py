"""Exact probability distributions over strings in Σ^n.

Everything here uses :class:`fractions.Fraction`; entropies are the only
floating-point outputs.  Distributions are stored sparsely, keyed by tuples
of symbols in ``range(d)``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from . import codec
from .config import check_cap
from .errors import (
    BoundViolation,
    DomainError,
    NotAPartition,
    PreconditionViolated,
    ShapeMismatch,
    ZeroProbabilityEvent,
)


class ExactDist:
    """Distribution on ``range(d) ** n`` with rational probabilities."""

    __slots__ = ("d", "n", "_p")

    def __init__(self, d, n, probs, cap=None):
        check_cap(d**n, cap)
        table = {}
        total = Fraction(0)
        for x, p in probs.items():
            x = tuple(x)
            p = Fraction(p)
            if len(x) != n or any(not 0 <= a < d for a in x):
                raise ShapeMismatch(f"{x!r} is not a string in [{d}]^{n}")
            if p < 0:
                raise DomainError("negative probability")
            if p:
                table[x] = table.get(x, 0) + p
            total += p
        if total != 1:
            raise DomainError(f"probabilities sum to {total}, not 1")
        self.d = d
        self.n = n
        self._p = table

    @classmethod
    def from_weights(cls, d, n, weights, cap=None):
        """Normalise nonnegative integer (or rational) weights."""
        total = sum(weights.values())
        if total <= 0:
            raise DomainError("weights must have positive total")
        return cls(d, n, {x: Fraction(w) / total for x, w in weights.items()}, cap=cap)

    def __getitem__(self, x):
        return self._p.get(tuple(x), Fraction(0))

    def __len__(self):
        return len(self._p)

    def __eq__(self, other):
        return (isinstance(other, ExactDist) and self.d == other.d
                and self.n == other.n and self._p == other._p)

    def __repr__(self):
        return f"ExactDist(d={self.d}, n={self.n}, support={len(self._p)})"

    def items(self):
        return self._p.items()

    def support(self):
        return set(self._p)

    def space(self):
        return itertools.product(range(self.d), repeat=self.n)

    # serialisation ------------------------------------------------------

    def to_json(self):
        entries = sorted(
            [codec.format_string(x, self.d), f"{p.numerator}/{p.denominator}"]
            for x, p in self._p.items()
        )
        return {"d": self.d, "n": self.n, "entries": entries}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        d, n = obj["d"], obj["n"]
        return cls(d, n, {codec.parse_string(s, d): Fraction(p) for s, p in obj["entries"]})


def uniform(d, n):
    p = Fraction(1, d**n)
    return ExactDist(d, n, {x: p for x in itertools.product(range(d), repeat=n)})


def uniform_on(d, n, support):
    support = [tuple(x) for x in support]
    if not support:
        raise DomainError("empty support")
    p = Fraction(1, len(set(support)))
    return ExactDist(d, n, {x: p for x in set(support)})


def point_mass(d, n, x):
    return ExactDist(d, n, {tuple(x): 1})


def _check_same_shape(A, B):
    if A.d != B.d or A.n != B.n:
        raise ShapeMismatch(f"({A.d}, {A.n}) vs ({B.d}, {B.n})")


def statistical_distance(A, B):
    """Half the ℓ1 distance between two distributions on the same space."""
    _check_same_shape(A, B)
    keys = A.support() | B.support()
    return sum((abs(A[x] - B[x]) for x in keys), Fraction(0)) / 2


def distance_from_uniform(A):
    """δ(A, U) without materialising the uniform table."""
    u = Fraction(1, A.d**A.n)
    inside = sum((abs(p - u) for _, p in A.items()), Fraction(0))
    outside = (A.d**A.n - len(A)) * u
    return (inside + outside) / 2


def linf_from_uniform(A):
    u = Fraction(1, A.d**A.n)
    worst = max((abs(p - u) for _, p in A.items()), default=Fraction(0))
    if len(A) < A.d**A.n:
        worst = max(worst, u)
    return worst


def min_entropy(A):
    """Min-entropy in d-ary symbols."""
    pmax = max(p for _, p in A.items())
    return -math.log(pmax) / math.log(A.d) if pmax < 1 else 0.0


def shannon_entropy(A, base=None):
    """Shannon entropy; d-ary symbols unless ``base`` is given."""
    base = A.d if base is None else base
    return entropy_of(p for _, p in A.items()) / math.log2(base)


def entropy_of(probs):
    """Shannon entropy in bits of an iterable of probabilities."""
    h = 0.0
    for p in probs:
        if p:
            h -= float(p) * math.log2(p)
    return h + 0.0


def marginal(A, S):
    S = tuple(S)
    out = {}
    for x, p in A.items():
        key = tuple(x[i] for i in S)
        out[key] = out.get(key, 0) + p
    return ExactDist(A.d, len(S), out)


def condition(A, S, w):
    """Distribution of A conditioned on the event ``A|_S = w``."""
    S = tuple(S)
    w = tuple(w)
    if len(S) != len(w):
        raise ShapeMismatch("index set and observation differ in length")
    sel = {x: p for x, p in A.items() if tuple(x[i] for i in S) == w}
    mass = sum(sel.values(), Fraction(0))
    if mass == 0:
        raise ZeroProbabilityEvent(f"Pr[X|_{S} = {w}] = 0")
    return ExactDist(A.d, A.n, {x: p / mass for x, p in sel.items()})


def pushforward(A, f, m=None, d_out=None):
    """Image of A under ``f``, a map from strings to strings."""
    d_out = A.d if d_out is None else d_out
    out = {}
    for x, p in A.items():
        y = tuple(f(x))
        out[y] = out.get(y, 0) + p
    if m is None:
        m = len(next(iter(out)))
    return ExactDist(d_out, m, out)


def duality_gap(joint, split=None):
    """Both sides of E_Y[δ(X|Y, X)] = E_X[δ(Y|X, Y)].

    ``joint`` is either a mapping ``{(a, b): p}`` or an :class:`ExactDist`
    whose first ``split`` coordinates are X.
    """
    if isinstance(joint, ExactDist):
        if split is None:
            raise ShapeMismatch("split is required for an ExactDist joint")
        pairs = {(x[:split], x[split:]): p for x, p in joint.items()}
    else:
        pairs = {k: Fraction(v) for k, v in joint.items() if v}
    px, py = {}, {}
    by_y, by_x = {}, {}
    for (a, b), p in pairs.items():
        px[a] = px.get(a, 0) + p
        py[b] = py.get(b, 0) + p
        by_y.setdefault(b, {})[a] = p
        by_x.setdefault(a, {})[b] = p
    # left side walks the Y-conditionals, right side the X-conditionals
    lhs = Fraction(0)
    for b, row in by_y.items():
        dist = sum((abs(row.get(a, 0) / py[b] - pa) for a, pa in px.items()), Fraction(0)) / 2
        lhs += py[b] * dist
    rhs = Fraction(0)
    for a, col in by_x.items():
        dist = sum((abs(col.get(b, 0) / px[a] - pb) for b, pb in py.items()), Fraction(0)) / 2
        rhs += px[a] * dist
    return lhs, rhs


def conditioning_mass_bound(A, partition):
    """Σ p_i δ(A|S_i, U_{S_i}) for a partition of the whole space.

    Raises :class:`BoundViolation` if the value exceeds 2·δ(A, U).
    """
    blocks = [set(map(tuple, b)) for b in partition]
    seen = set()
    for b in blocks:
        if not b or seen & b:
            raise NotAPartition("blocks must be nonempty and disjoint")
        seen |= b
    if len(seen) != A.d**A.n or any(len(x) != A.n for x in seen):
        raise NotAPartition("blocks do not cover the sample space")
    total = Fraction(0)
    for b in blocks:
        pb = sum((A[x] for x in b), Fraction(0))
        if pb == 0:
            continue
        u = Fraction(1, len(b))
        total += pb * sum((abs(A[x] / pb - u) for x in b), Fraction(0)) / 2
    gamma = distance_from_uniform(A)
    if total > 2 * gamma:
        raise BoundViolation(f"{total} > 2*{gamma}")
    return total


def shannon_floor_check(A, S, eps):
    """Whether H(A) >= lg|S| (1 - eps) for A eps-close to uniform on S (bits)."""
    S = set(map(tuple, S))
    eps = Fraction(eps)
    if len(S) <= 4 or eps > Fraction(1, 4):
        raise PreconditionViolated("requires |S| > 4 and eps <= 1/4")
    dist = statistical_distance(A, uniform_on(A.d, A.n, S))
    if dist > eps:
        raise PreconditionViolated(f"distribution is {dist}-far from uniform on S, not {eps}")
    return shannon_entropy(A, base=2) >= math.log2(len(S)) * (1 - float(eps)) - 1e-12


def hq(x, q):
    """The q-ary entropy function."""
    if not 0 <= x <= 1:
        raise DomainError("hq is defined on [0, 1]")
    if q < 2:
        raise DomainError("q must be at least 2")
    out = x * math.log(q - 1, q) if x else 0.0
    if 0 < x < 1:
        out -= x * math.log(x, q) + (1 - x) * math.log(1 - x, q)
    return out


# ---------------------------------------------------------------------------
# Source families


@dataclass(frozen=True)
class SourceDescriptor:
    """A symbol-fixing, affine or general weak source.

    ``fixed`` maps positions to values (symbol-fixing); ``basis`` and
    ``offset`` describe an affine coset over GF(d) (affine); ``k`` is the
    min-entropy floor, the only data a general source carries.
    """

    kind: str
    d: int
    n: int
    k: int
    fixed: tuple = ()
    basis: tuple = ()
    offset: tuple = ()
    meta: dict = dc_field(default_factory=dict, compare=False, hash=False)

    @classmethod
    def symbol_fixing(cls, d, n, fixed):
        fixed = tuple(sorted(dict(fixed).items()))
        return cls("symbol-fixing", d, n, n - len(fixed), fixed=fixed)

    @classmethod
    def affine(cls, q, basis, offset):
        from .gf import field, rank

        basis = tuple(tuple(int(v) for v in b) for b in basis)
        offset = tuple(int(v) for v in offset)
        n = len(offset)
        if basis and rank(field(q), list(basis)) != len(basis):
            raise DomainError("affine basis is not linearly independent")
        return cls("affine", q, n, len(basis), basis=basis, offset=offset)

    @classmethod
    def general(cls, d, n, k):
        return cls("general", d, n, k)

    def points(self):
        if self.kind == "symbol-fixing":
            fixed = dict(self.fixed)
            free = [i for i in range(self.n) if i not in fixed]
            for vals in itertools.product(range(self.d), repeat=len(free)):
                x = [0] * self.n
                for i, v in fixed.items():
                    x[i] = v
                for i, v in zip(free, vals):
                    x[i] = v
                yield tuple(x)
        elif self.kind == "affine":
            from .gf import field

            F = field(self.d)
            for coeffs in itertools.product(range(self.d), repeat=len(self.basis)):
                x = list(self.offset)
                for c, b in zip(coeffs, self.basis):
                    if c:
                        x = [F.add(xi, F.mul(c, bi)) for xi, bi in zip(x, b)]
                yield tuple(int(v) for v in x)
        else:
            raise DomainError("general sources have no explicit support")

    def to_dist(self):
        check_cap(self.d ** self.k)
        return uniform_on(self.d, self.n, self.points())


def symbol_fixing_sources(d, n, k):
    """Every (n, k)_d symbol-fixing source with exactly k free positions."""
    for free in itertools.combinations(range(n), k):
        fixed_pos = [i for i in range(n) if i not in free]
        for vals in itertools.product(range(d), repeat=len(fixed_pos)):
            yield SourceDescriptor.symbol_fixing(d, n, zip(fixed_pos, vals))
