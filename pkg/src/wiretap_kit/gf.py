"""Finite-field arithmetic and linear algebra.

Two kinds of fields are supported: prime fields GF(p) with p < 2**31 and
binary extension fields GF(2**e) with e <= 16.  Elements are plain integers
in ``[0, q)``; for GF(2**e) an element is the bit pattern of a polynomial
over GF(2).  Vectors and matrices are numpy ``int64`` arrays.

GF(2) has a second, bit-packed representation used by the extractor
modules: a vector of length n is an ``int`` whose most significant of n
bits is coordinate 0, and a matrix is a list of such row integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, DomainError, NoSolution

# Primitive polynomials (with the x^e term) for GF(2^e).
_PRIMITIVE = {
    2: 0x7, 3: 0xB, 4: 0x13, 5: 0x25, 6: 0x43, 7: 0x89, 8: 0x11D,
    9: 0x211, 10: 0x409, 11: 0x805, 12: 0x1053, 13: 0x201B, 14: 0x4443,
    15: 0x8003, 16: 0x1100B,
}


def _is_prime(p):
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def clmul(a, b):
    """Carryless product of two bit polynomials."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_mod(a, modulus):
    deg = modulus.bit_length() - 1
    while a.bit_length() - 1 >= deg:
        a ^= modulus << (a.bit_length() - 1 - deg)
    return a


class Field:
    """The field with ``q`` elements.

    Scalar and array arguments are both accepted by the arithmetic methods;
    arrays are combined elementwise.
    """

    def __init__(self, q):
        q = int(q)
        if _is_prime(q):
            if q >= 1 << 31:
                raise DomainError("prime fields are limited to p < 2**31")
            self.order = q
            self.characteristic = q
            self.degree = 1
            self.kind = "prime"
            self.modulus = None
            return
        e = q.bit_length() - 1
        if q != 1 << e or e > 16 or e < 2:
            raise DomainError(f"unsupported field order {q}")
        self.order = q
        self.characteristic = 2
        self.degree = e
        self.kind = "binary"
        self.modulus = _PRIMITIVE[e]
        exp = np.zeros(2 * (q - 1), dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        a = 1
        for i in range(q - 1):
            if log[a] != -1:
                raise DomainError(f"modulus {self.modulus:#x} is not primitive")
            exp[i] = a
            log[a] = i
            a = poly_mod(clmul(a, 2), self.modulus)
        exp[q - 1:] = exp[: q - 1]
        self._exp = exp
        self._log = log

    def __repr__(self):
        return f"Field({self.order})"

    def __eq__(self, other):
        return isinstance(other, Field) and other.order == self.order

    def __hash__(self):
        return hash(("Field", self.order))

    @property
    def is_binary(self):
        return self.characteristic == 2

    def elements(self):
        return range(self.order)

    # arithmetic ---------------------------------------------------------

    def add(self, a, b):
        if self.is_binary:
            return np.bitwise_xor(a, b) if _is_array(a, b) else a ^ b
        return (a + b) % self.order

    def neg(self, a):
        if self.is_binary:
            return a
        return (-a) % self.order

    def sub(self, a, b):
        if self.is_binary:
            return self.add(a, b)
        return (a - b) % self.order

    def mul(self, a, b):
        if self.kind == "prime":
            return (a * b) % self.order
        if _is_array(a, b):
            a = np.asarray(a, dtype=np.int64)
            b = np.asarray(b, dtype=np.int64)
            zero = (a == 0) | (b == 0)
            out = self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]
            return np.where(zero, 0, out)
        if a == 0 or b == 0:
            return 0
        return int(self._exp[self._log[a] + self._log[b]])

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        if self.kind == "prime":
            return pow(int(a), -1, self.order)
        return int(self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)])

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, k):
        out = 1
        for _ in range(k):
            out = self.mul(out, a)
        return out

    # vectors and matrices ---------------------------------------------

    def array(self, values):
        arr = np.array(values, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= self.order):
            raise DomainError(f"entries outside GF({self.order})")
        return arr

    def dot(self, u, v):
        prods = self.mul(np.asarray(u, dtype=np.int64), np.asarray(v, dtype=np.int64))
        if self.is_binary:
            return int(np.bitwise_xor.reduce(prods)) if prods.size else 0
        return int(prods.sum() % self.order)

    def matvec(self, M, x):
        M = np.asarray(M, dtype=np.int64)
        x = np.asarray(x, dtype=np.int64)
        if M.ndim != 2 or M.shape[1] != x.shape[0]:
            raise DimensionMismatch(f"cannot apply {M.shape} matrix to length {x.shape[0]}")
        return np.array([self.dot(row, x) for row in M], dtype=np.int64)

    def matmul(self, A, B):
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        if A.shape[1] != B.shape[0]:
            raise DimensionMismatch(f"cannot multiply {A.shape} by {B.shape}")
        return np.array([[self.dot(A[i], B[:, j]) for j in range(B.shape[1])]
                         for i in range(A.shape[0])], dtype=np.int64).reshape(A.shape[0], B.shape[1])

    def scale(self, c, v):
        return self.mul(np.full(len(v), c, dtype=np.int64), np.asarray(v, dtype=np.int64))

    def axpy(self, c, x, y):
        """Return ``c*x + y``."""
        return self.add(self.scale(c, x), np.asarray(y, dtype=np.int64))


def _is_array(*args):
    return any(isinstance(a, np.ndarray) for a in args)


@lru_cache(maxsize=None)
def field(q):
    """Cached field constructor."""
    return Field(q)


# ---------------------------------------------------------------------------
# Gaussian elimination over a generic field


def rref(F, M):
    """Reduced row echelon form and pivot columns.

    Pivots are the first nonzero entry found scanning rows top-down in each
    column, so the result is deterministic.
    """
    R = np.array(M, dtype=np.int64, copy=True)
    if R.ndim != 2:
        raise DimensionMismatch("rref expects a 2-d matrix")
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            R[[r, p]] = R[[p, r]]
        R[r] = F.scale(F.inv(int(R[r, c])), R[r])
        for i in range(rows):
            if i != r and R[i, c]:
                R[i] = F.sub(R[i], F.scale(int(R[i, c]), R[r]))
        pivots.append(c)
        r += 1
    return R, pivots


def rank(F, M):
    M = np.asarray(M, dtype=np.int64)
    if M.size == 0:
        return 0
    return len(rref(F, M)[1])


def kernel_basis(F, M):
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[1]
    R, pivots = rref(F, M)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(n, dtype=np.int64)
        v[f] = 1
        for i, p in enumerate(pivots):
            v[p] = F.neg(int(R[i, f]))
        basis.append(v)
    return basis


@dataclass(frozen=True)
class AffineSolutionSet:
    """All solutions of a linear system: ``particular + span(kernel)``."""

    field: Field
    particular: tuple
    kernel: tuple

    @property
    def dimension(self):
        return len(self.kernel)

    def __len__(self):
        return self.field.order ** self.dimension

    def point(self, coefficients):
        F = self.field
        x = np.array(self.particular, dtype=np.int64)
        for c, b in zip(coefficients, self.kernel):
            if c:
                x = F.axpy(int(c), np.array(b, dtype=np.int64), x)
        return tuple(int(v) for v in x)

    def point_at(self, index):
        """The solution whose kernel coefficients are the base-q digits of ``index``."""
        q = self.field.order
        coeffs = []
        for _ in range(self.dimension):
            index, c = divmod(index, q)
            coeffs.append(c)
        return self.point(reversed(coeffs))

    def __iter__(self):
        for i in range(len(self)):
            yield self.point_at(i)


def solve_affine(F, M, y):
    """Solve ``M x = y``; raises :class:`NoSolution` when inconsistent."""
    M = np.asarray(M, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if M.ndim != 2 or y.ndim != 1 or M.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"matrix {M.shape} incompatible with rhs of length {y.shape}")
    m, n = M.shape
    if F.order == 2:
        rows = [pack_row(r) for r in M]
        part, kern = gf2_solve(rows, pack_row(y), n)
        return AffineSolutionSet(F, unpack_row(part, n), tuple(unpack_row(k, n) for k in kern))
    R, pivots = rref(F, np.hstack([M, y.reshape(-1, 1)]))
    if n in pivots:
        raise NoSolution("inconsistent system")
    x = np.zeros(n, dtype=np.int64)
    for i, p in enumerate(pivots):
        x[p] = R[i, n]
    kern = kernel_basis(F, M)
    return AffineSolutionSet(F, tuple(int(v) for v in x), tuple(tuple(int(v) for v in b) for b in kern))


def sample_affine(sol, rng):
    """Uniform sample from an affine solution set."""
    coeffs = rng.integers(0, sol.field.order, size=sol.dimension)
    return sol.point(coeffs)


# ---------------------------------------------------------------------------
# Bit-packed GF(2)


def pack_row(bits):
    out = 0
    for b in bits:
        out = (out << 1) | (int(b) & 1)
    return out


def unpack_row(value, n):
    return tuple((value >> (n - 1 - i)) & 1 for i in range(n))


def gf2_matvec(rows, x):
    """Product of a packed matrix with a packed vector; row 0 is the top bit."""
    out = 0
    for r in rows:
        out = (out << 1) | ((r & x).bit_count() & 1)
    return out


def gf2_rref(rows, ncols):
    """Packed RREF; returns (rows, pivot columns) with zero rows dropped."""
    rows = list(rows)
    pivots = []
    r = 0
    for c in range(ncols):
        bit = 1 << (ncols - 1 - c)
        p = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def gf2_rank(rows, ncols):
    return len(gf2_rref(rows, ncols)[1])


def gf2_kernel(rows, ncols):
    R, pivots = gf2_rref(rows, ncols)
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        v = 1 << (ncols - 1 - f)
        for i, p in enumerate(pivots):
            if R[i] >> (ncols - 1 - f) & 1:
                v |= 1 << (ncols - 1 - p)
        basis.append(v)
    return basis


def gf2_solve(rows, y, ncols):
    """Packed solve of ``rows @ x = y`` (``y`` has one bit per row, top bit first).

    Returns ``(particular, kernel_basis)``; raises :class:`NoSolution`.
    """
    m = len(rows)
    aug = [(r << 1) | ((y >> (m - 1 - i)) & 1) for i, r in enumerate(rows)]
    R, pivots = gf2_rref(aug, ncols + 1)
    if ncols in pivots:
        raise NoSolution("inconsistent system")
    x = 0
    for i, p in enumerate(pivots):
        if R[i] & 1:
            x |= 1 << (ncols - 1 - p)
    return x, gf2_kernel(rows, ncols)


def gf2_span(basis):
    """All 2**len(basis) combinations, indexed like :func:`gf2_combination`."""
    return [gf2_combination(basis, i) for i in range(1 << len(basis))]


def gf2_combination(basis, coeffs):
    """Combination of packed vectors selected by the bits of ``coeffs`` (top bit = basis[0])."""
    k = len(basis)
    out = 0
    for j, b in enumerate(basis):
        if coeffs >> (k - 1 - j) & 1:
            out ^= b
    return out
