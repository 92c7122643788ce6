"""Wiretap protocols built from invertible extractors, and their exact verification."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from . import codec
from .config import check_cap
from .dists import duality_gap
from .errors import BoundViolation, DomainError, ShapeMismatch


def frac_str(v):
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


class WiretapProtocol:
    """Encoder ``y = enc(x, z)`` with ``z`` uniform in ``range(seed_space)``, decoder ``x = dec(y)``.

    ``targets`` holds the declared ``(t, eps, gamma)``.
    """

    def __init__(self, q, m, n, seed_space, encoder, decoder, targets=(0, 0, 0),
                 name="protocol", params=None):
        if m < 1 or n < 1 or seed_space < 1:
            raise DomainError("lengths and seed space must be positive")
        self.q, self.m, self.n = q, m, n
        self.seed_space = seed_space
        self._enc = encoder
        self._dec = decoder
        t, eps, gamma = targets
        self.t, self.eps, self.gamma = t, Fraction(eps), Fraction(gamma)
        self.name = name
        self.params = dict(params or {})
        self._table = None

    def __repr__(self):
        return f"WiretapProtocol({self.name}, q={self.q}, m={self.m}, n={self.n})"

    @property
    def seed_bits(self):
        return max(0, (self.seed_space - 1).bit_length())

    @property
    def rate(self):
        return Fraction(self.m, self.n)

    def encode_raw(self, x, z):
        x = tuple(x)
        if len(x) != self.m or any(not 0 <= a < self.q for a in x):
            raise ShapeMismatch(f"message must be {self.m} symbols over [0, {self.q})")
        if not 0 <= z < self.seed_space:
            raise DomainError("seed outside the seed space")
        return tuple(self._enc(x, z))

    def decode_raw(self, y):
        y = tuple(y)
        if len(y) != self.n or any(not 0 <= a < self.q for a in y):
            raise ShapeMismatch(f"codeword must be {self.n} symbols over [0, {self.q})")
        return tuple(self._dec(y))

    def encode_table(self):
        """``table[x, z]`` is the big-endian index of ``enc(x, z)``."""
        if self._table is None:
            M = self.q**self.m
            check_cap(M * self.seed_space)
            tab = np.empty((M, self.seed_space), dtype=np.int64)
            for xi in range(M):
                x = codec.to_digits(xi, self.q, self.m)
                for z in range(self.seed_space):
                    tab[xi, z] = codec.from_digits(self._enc(x, z), self.q)
            tab.setflags(write=False)
            self._table = tab
        return self._table

    def check_decodability(self):
        tab = self.encode_table()
        for xi in range(tab.shape[0]):
            x = codec.to_digits(xi, self.q, self.m)
            for yi in set(tab[xi].tolist()):
                if self._dec(codec.to_digits(yi, self.q, self.n)) != x:
                    return False
        return True

    def declared(self):
        return {"t": self.t, "epsilon": frac_str(self.eps), "gamma": frac_str(self.gamma)}


def encode(P, x, rng):
    return P.encode_raw(x, int(rng.integers(0, P.seed_space)))


def decode(P, y):
    return P.decode_raw(y)


def from_invertible_extractor(ext, k, ext_error, inverter_distance=None, name=None):
    """Protocol with encoder = inverter and decoder = extractor.

    Declared targets are ``(n - k, ext_error + gamma, gamma)``; ``gamma`` is
    the measured inverter distance unless given.
    """
    gamma = ext.inverter_distance() if inverter_distance is None else Fraction(inverter_distance)
    eps = Fraction(ext_error)
    return WiretapProtocol(
        ext.d, ext.m, ext.n, ext.seed_space,
        encoder=ext.invert, decoder=ext.extract,
        targets=(ext.n - k, eps + gamma, gamma),
        name=name or type(ext).__name__,
        params={"k": k, "extractor_error": frac_str(eps), "inverter_distance": frac_str(gamma)},
    )


# ---------------------------------------------------------------------------
# Exact conditional statistics


def _digits_array(indices, q, n):
    out = np.empty(indices.shape + (n,), dtype=np.int64)
    v = indices.copy()
    for i in range(n - 1, -1, -1):
        out[..., i] = v % q
        v //= q
    return out


def observation_counts(P, keys, nkeys):
    """``counts[w, x]``: number of seeds z with observation ``keys[x, z] == w``."""
    M = keys.shape[0]
    flat = (keys * M + np.arange(M, dtype=np.int64)[:, None]).ravel()
    return np.bincount(flat, minlength=nkeys * M).reshape(nkeys, M)


@dataclass(frozen=True)
class Observation:
    w: int
    mass: Fraction
    distance: Fraction
    entropy: float  # Shannon entropy of X | w, in bits


def conditional_profile(counts):
    """Per-observation mass, distance of X|w from uniform, and entropy of X|w."""
    counts = np.asarray(counts, dtype=np.int64)
    M = counts.shape[1]
    total = int(counts.sum())
    out = []
    for w in np.nonzero(counts.sum(axis=1))[0]:
        row = counts[w]
        tot = int(row.sum())
        dist = Fraction(int(np.abs(row * M - tot).sum()), 2 * tot * M)
        ent = 0.0
        for c in row[row > 0].tolist():
            ent -= c / tot * math.log2(c / tot)
        out.append(Observation(int(w), Fraction(tot, total), dist, ent + 0.0))
    return out


def threshold_for_gamma(profile, gamma):
    """Smallest ε with Pr[δ_w > ε] <= γ."""
    gamma = Fraction(gamma)
    values = sorted({o.distance for o in profile} | {Fraction(0)})
    for eps in values:
        if sum((o.mass for o in profile if o.distance > eps), Fraction(0)) <= gamma:
            return eps
    return values[-1]


def bad_mass(profile, eps):
    return sum((o.mass for o in profile if o.distance > eps), Fraction(0))


def colex_subsets(n, t):
    """All subsets of range(n) of size <= t, by size then in colex order."""
    for j in range(0, min(t, n) + 1):
        yield from sorted(itertools.combinations(range(n), j), key=lambda s: s[::-1])


def subset_keys(digits, S, q):
    key = np.zeros(digits.shape[:-1], dtype=np.int64)
    for i in S:
        key = key * q + digits[..., i]
    return key


@dataclass
class SubsetRecord:
    S: tuple
    profile: list
    bad: list
    bad_mass: Fraction
    max_distance: Fraction
    epsilon_at_gamma: Fraction
    equivocation: float

    def to_json(self, q):
        width = len(self.S)
        return {
            "S": list(self.S),
            "bad": [codec.format_string(codec.to_digits(w, q, width), q) for w in self.bad],
            "bad_mass": frac_str(self.bad_mass),
            "max_distance": frac_str(self.max_distance),
            "observations": [
                [codec.format_string(codec.to_digits(o.w, q, width), q), frac_str(o.mass),
                 frac_str(o.distance)]
                for o in self.profile
            ],
        }


@dataclass
class ResilienceReport:
    params: dict
    t: int
    epsilon_target: Fraction
    gamma_target: Fraction
    subsets: list = dc_field(default_factory=list)
    q: int = 2
    m: int = 1

    @property
    def gamma_measured(self):
        return max((r.bad_mass for r in self.subsets), default=Fraction(0))

    @property
    def epsilon_measured(self):
        return max((r.epsilon_at_gamma for r in self.subsets), default=Fraction(0))

    @property
    def max_distance(self):
        return max((r.max_distance for r in self.subsets), default=Fraction(0))

    @property
    def equivocation(self):
        """min over S of H(X | Y|_S) in q-ary symbols."""
        return min((r.equivocation for r in self.subsets), default=float(self.m))

    @property
    def zero_leakage(self):
        return self.gamma_measured == 0

    @property
    def passed(self):
        return self.gamma_measured <= self.gamma_target

    def restrict(self, t):
        """The report for a smaller threshold, read off the same pass."""
        return ResilienceReport(self.params, t, self.epsilon_target, self.gamma_target,
                                [r for r in self.subsets if len(r.S) <= t], self.q, self.m)

    def to_json(self):
        return {
            "params": self.params,
            "t": self.t,
            "epsilon_target": frac_str(self.epsilon_target),
            "gamma_target": frac_str(self.gamma_target),
            "epsilon_profile": [r.to_json(self.q) for r in self.subsets],
            "epsilon_measured": frac_str(self.epsilon_measured),
            "gamma": frac_str(self.gamma_measured),
            "equivocation": round(self.equivocation, 12),
            "zero_leakage": self.zero_leakage,
            "passed": self.passed,
        }


def _record(S, counts, q, m, eps, gamma):
    profile = conditional_profile(counts)
    bad = [o.w for o in profile if o.distance > eps]
    ent = sum(float(o.mass) * o.entropy for o in profile) / math.log2(q)
    return SubsetRecord(
        S=tuple(S), profile=profile, bad=bad, bad_mass=bad_mass(profile, eps),
        max_distance=max(o.distance for o in profile),
        epsilon_at_gamma=threshold_for_gamma(profile, gamma),
        equivocation=ent,
    )


def verify_resilience(P, t=None, eps_target=None, gamma_target=None):
    """Exact check of every observation set S with |S| <= t.

    For each S the conditional message distribution is computed for every
    observation w; w is bad when that distribution is farther than
    ``eps_target`` from uniform.
    """
    t = P.t if t is None else t
    eps = P.eps if eps_target is None else Fraction(eps_target)
    gamma = P.gamma if gamma_target is None else Fraction(gamma_target)
    if not 0 <= t <= P.n:
        raise DomainError("t must lie in [0, n]")
    M = P.q**P.m
    check_cap(M * P.seed_space * math.comb(P.n, t))
    digits = _digits_array(np.asarray(P.encode_table()), P.q, P.n)
    report = ResilienceReport(
        params={"name": P.name, "q": P.q, "m": P.m, "n": P.n, "seed_space": P.seed_space,
                **P.params, "declared": P.declared()},
        t=t, epsilon_target=eps, gamma_target=gamma, q=P.q, m=P.m,
    )
    for S in colex_subsets(P.n, t):
        keys = subset_keys(digits, S, P.q)
        counts = observation_counts(P, keys, P.q ** len(S))
        report.subsets.append(_record(S, counts, P.q, P.m, eps, gamma))
    return report


def observation_report(P, observe, nkeys, eps_target=None, gamma_target=None, label="custom"):
    """Same statistics for an arbitrary deterministic view ``observe(y_index) -> key``."""
    eps = P.eps if eps_target is None else Fraction(eps_target)
    gamma = P.gamma if gamma_target is None else Fraction(gamma_target)
    tab = np.asarray(P.encode_table())
    lut = np.array([observe(i) for i in range(P.q**P.n)], dtype=np.int64)
    counts = observation_counts(P, lut[tab], nkeys)
    rec = _record((label,), counts, P.q, P.m, eps, gamma)
    return rec


def _subset_joint(P, S, digits):
    keys = subset_keys(digits, S, P.q)
    return observation_counts(P, keys, P.q ** len(S))


def duality_sides(P, S):
    """Both sides of the duality for (X, Y|_S), computed by the generic exact routine."""
    digits = _digits_array(np.asarray(P.encode_table()), P.q, P.n)
    counts = _subset_joint(P, S, digits)
    total = int(counts.sum())
    joint = {(x, w): Fraction(int(counts[w, x]), total)
             for w, x in zip(*np.nonzero(counts))}
    return duality_gap(joint)


@dataclass(frozen=True)
class AontReport:
    value: Fraction       # 2 E_X δ(W|X, W), maximised over S
    pairwise: Fraction    # E_{X,X'} δ(W|X, W|X'), maximised over S
    worst_subset: tuple
    bound: Fraction       # 2 (eps + gamma) at the measured values
    duality_exact: bool

    def to_json(self):
        return {"value": frac_str(self.value), "pairwise": frac_str(self.pairwise),
                "worst_subset": list(self.worst_subset), "bound": frac_str(self.bound),
                "duality_exact": self.duality_exact}


def aont_error(P, t=None, report=None):
    """Average-case exposure error, checked against twice the measured (ε + γ)."""
    t = P.t if t is None else t
    report = verify_resilience(P, t) if report is None else report
    digits = _digits_array(np.asarray(P.encode_table()), P.q, P.n)
    M = P.q**P.m
    best, best_pair, worst_S, exact = Fraction(0), Fraction(0), (), True
    for S in colex_subsets(P.n, t):
        counts = _subset_joint(P, S, digits)  # [w, x]
        Z = P.seed_space
        marg = counts.sum(axis=1)  # M * Z * Pr[w]
        # E_X δ(W|X, W) with exact integer arithmetic
        num = int(np.abs(counts * M - marg[:, None]).sum())
        side = Fraction(num, 2 * M * Z * M)
        pair_num = 0
        for a in range(M):
            pair_num += int(np.abs(counts[:, a][:, None] - counts).sum())
        pairwise = Fraction(pair_num, 2 * Z * M * M)
        lhs, rhs = duality_gap({(x, w): Fraction(int(counts[w, x]), M * Z)
                                for w, x in zip(*np.nonzero(counts))})
        exact &= lhs == rhs == side
        if 2 * side > best:
            best, worst_S = 2 * side, S
        best_pair = max(best_pair, pairwise)
    bound = 2 * (report.epsilon_measured + report.gamma_measured)
    out = AontReport(best, best_pair, worst_S, bound, exact)
    if best > bound:
        raise BoundViolation(f"exposure error {best} exceeds {bound}")
    return out


def equivocation(P, t=None, report=None, check=True):
    """min over |S| <= t of H(X | Y|_S) in q-ary symbols.

    With ``check`` the value is compared with ``m (1 - ε - γ)`` at the
    measured ε and γ; this comparison needs ε <= 1/4 and more than four
    messages, and is skipped otherwise.
    """
    t = P.t if t is None else t
    report = verify_resilience(P, t) if report is None else report
    value = report.equivocation
    eps, gamma = report.epsilon_measured, report.gamma_measured
    floor = P.m * (1 - float(eps) - float(gamma))
    applicable = eps <= Fraction(1, 4) and P.q**P.m > 4
    if check and applicable and value < floor - 1e-12:
        raise BoundViolation(f"equivocation {value} below {floor}")
    return value, floor, applicable


# ---------------------------------------------------------------------------
# Named protocols


def one_time_pad():
    """Two-symbol pad over bits: the walk extractor on the 2-vertex complete graph."""
    from .expander import complete_selfloop
    from .sfext import SfextParams

    ext = SfextParams(complete_selfloop(2), d=2, n=2, m=1, lam=0.0)
    return from_invertible_extractor(ext, k=1, ext_error=0, inverter_distance=0,
                                     name="one-time-pad")


def identity_protocol(q=2, n=1, t=1):
    """E(x) = x: the maximally leaky baseline, declared as if it were perfect."""
    return WiretapProtocol(q, n, n, 1, encoder=lambda x, z: x, decoder=lambda y: y,
                           targets=(t, 0, 0), name="identity")
