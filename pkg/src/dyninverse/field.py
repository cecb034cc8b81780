"""Exact arithmetic over Z_p and over truncated polynomials Z_p[X]/<X^m>.

Matrices over either ring are numpy ``int64`` arrays with entries in
``[0, p)``.  Field matrices have shape ``(rows, cols)``; polynomial matrices
carry the coefficient index as a trailing axis, shape ``(rows, cols, m)``.
Ring objects (``PrimeField`` and ``PolyRing``) supply the handful of
operations the generic algorithms need: products, block inverses, and a few
scalar helpers.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import sympy

from .errors import DimensionMismatch, NonUnit, NotUnipotent, Singular, ZeroInverse

# Largest prime below 2**62.
DEFAULT_PRIME = 2**62 - 57

_LIMB_BITS = 21
_FLOAT_EXACT = 2**53
# Below this size a block inverse is done by plain Gauss-Jordan.
_SCHUR_BASE = 32


class PrimeField:
    """The prime field Z_p for a word-sized prime ``p >= 3``."""

    tail: tuple[int, ...] = ()

    def __init__(self, p: int = DEFAULT_PRIME):
        p = int(p)
        if p < 3 or p >= 2**62 or not sympy.isprime(p):
            raise ValueError(f"modulus must be a prime in [3, 2^62), got {p}")
        self.p = p
        self._pinv = np.longdouble(1) / np.longdouble(p)
        self._small = p < 3_037_000_499  # p*p fits in int64
        self._limbs = -(-p.bit_length() // _LIMB_BITS)
        limb_max = min(2**_LIMB_BITS, p) - 1
        self._kblock = max(1, _FLOAT_EXACT // max(1, limb_max * limb_max))
        self._shift = [pow(2, _LIMB_BITS * s, p) for s in range(2 * self._limbs - 1)]
        # Primes just below 2^62 allow multiplying by 2^21 with int64 shifts only.
        self._c62 = 2**62 - p if p > 2**61 and 2**62 - p < 2**30 else None

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("Zp", self.p))

    # -- scalars -------------------------------------------------------
    def element(self, v: int) -> "FieldElement":
        return FieldElement(int(v) % self.p, self)

    def one(self) -> int:
        return 1

    def zero(self) -> int:
        return 0

    def scalar(self, x) -> int:
        return int(x) % self.p

    def smul(self, x, y) -> int:
        return int(x) * int(y) % self.p

    def sadd(self, x, y) -> int:
        return (int(x) + int(y)) % self.p

    def ssub(self, x, y) -> int:
        return (int(x) - int(y)) % self.p

    def sinv(self, x) -> int:
        x = int(x) % self.p
        if x == 0:
            raise ZeroInverse("zero has no inverse")
        return pow(x, -1, self.p)

    def is_zero(self, x) -> bool:
        return int(x) % self.p == 0

    def is_unit(self, x) -> bool:
        return int(x) % self.p != 0

    def lift(self, v) -> int:
        """Wrap a Python int (any size) as a matrix entry."""
        return int(v) % self.p

    # -- arrays --------------------------------------------------------
    def asarray(self, a) -> np.ndarray:
        arr = np.asarray(a)
        if arr.dtype == object or arr.dtype.kind not in "iu":
            arr = np.vectorize(lambda v: int(v) % self.p, otypes=[np.int64])(np.asarray(a, dtype=object))
            return arr.astype(np.int64)
        arr = arr.astype(np.int64, copy=True)
        return arr % self.p

    def zeros(self, r: int, c: int) -> np.ndarray:
        return np.zeros((r, c), dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def add(self, a, b) -> np.ndarray:
        return (a + b) % self.p

    def sub(self, a, b) -> np.ndarray:
        return (a - b) % self.p

    def neg(self, a) -> np.ndarray:
        return (-a) % self.p

    def random(self, rng: np.random.Generator, shape, nonzero: bool = False) -> np.ndarray:
        low = 1 if nonzero else 0
        return rng.integers(low, self.p, size=shape, dtype=np.int64)

    def mulmod(self, a, b) -> np.ndarray:
        """Elementwise product mod p (broadcasting)."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self._small:
            return (a * b) % self.p
        q = np.floor(a.astype(np.longdouble) * b.astype(np.longdouble) * self._pinv).astype(np.int64)
        with np.errstate(over="ignore"):
            # wraps mod 2^64; the true remainder is small, so it survives
            r = a * b - q * self.p
        r = np.where(r < 0, r + self.p, r)
        return np.where(r >= self.p, r - self.p, r)

    def scale(self, a, x) -> np.ndarray:
        return self.mulmod(a, np.int64(int(x) % self.p))

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Exact product mod p using float64 BLAS on 21-bit limbs."""
        if a.shape[1] != b.shape[0]:
            raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
        r, k = a.shape
        c = b.shape[1]
        out = np.zeros((r, c), dtype=np.int64)
        if r == 0 or c == 0 or k == 0:
            return out
        for k0 in range(0, k, self._kblock):
            part = self._matmul_block(a[:, k0:k0 + self._kblock], b[k0:k0 + self._kblock])
            out = (out + part) % self.p
        return out

    def _matmul_block(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        L = self._limbs
        r, c = a.shape[0], b.shape[1]
        mask = (1 << _LIMB_BITS) - 1
        la = np.concatenate([((a >> (_LIMB_BITS * i)) & mask) for i in range(L)], axis=0).astype(np.float64)
        lb = np.concatenate([((b >> (_LIMB_BITS * j)) & mask) for j in range(L)], axis=1).astype(np.float64)
        prod = (la @ lb).astype(np.int64)

        def diag(s):
            q = np.zeros((r, c), dtype=np.int64)
            for i in range(max(0, s - L + 1), min(L, s + 1)):
                j = s - i
                q += prod[i * r:(i + 1) * r, j * c:(j + 1) * c]
            return q % self.p

        if self._c62 is not None:
            out = diag(2 * L - 2)
            for s in range(2 * L - 3, -1, -1):
                out = self._shift21(out) + diag(s)
                out = np.where(out >= self.p, out - self.p, out)
            return out
        out = np.zeros((r, c), dtype=np.int64)
        for s in range(2 * L - 1):
            q = diag(s)
            if s:
                q = self.mulmod(q, np.int64(self._shift[s]))
            out += q
            out %= self.p
        return out

    def _shift21(self, x: np.ndarray) -> np.ndarray:
        # x * 2^21 mod p for x in [0, p), using 2^62 = c62 (mod p).
        r = ((x & ((1 << 41) - 1)) << 21) + (x >> 41) * self._c62
        return np.where(r >= self.p, r - self.p, r)

    # -- elimination ---------------------------------------------------
    def gauss_jordan(self, a: np.ndarray) -> tuple[np.ndarray, int]:
        """Inverse and determinant by row-pivoted Gauss-Jordan."""
        n = a.shape[0]
        if a.shape != (n, n):
            raise DimensionMismatch("square matrix required")
        p = self.p
        aug = np.concatenate([a % p, np.eye(n, dtype=np.int64)], axis=1)
        det = 1
        for col in range(n):
            nz = np.flatnonzero(aug[col:, col])
            if nz.size == 0:
                raise Singular("zero pivot")
            piv = col + int(nz[0])
            if piv != col:
                aug[[col, piv]] = aug[[piv, col]]
                det = -det
            pv = int(aug[col, col])
            det = det * pv % p
            row = self.scale(aug[col], pow(pv, -1, p))
            aug[col] = row
            factors = aug[:, col].copy()
            factors[col] = 0
            nzr = np.flatnonzero(factors)
            if nzr.size:
                aug[nzr] = (aug[nzr] - self.mulmod(factors[nzr, None], row[None, :])) % p
        return aug[:, n:].copy(), det % p

    def gaussian_inverse(self, a: np.ndarray) -> tuple[np.ndarray, int]:
        """Inverse and determinant; recursive Schur split for large inputs."""
        n = a.shape[0]
        if a.ndim != 2 or a.shape != (n, n):
            raise DimensionMismatch("square matrix required")
        if n <= _SCHUR_BASE:
            return self.gauss_jordan(a)
        try:
            return self._schur_inverse(a)
        except Singular:
            pass
        # A singular leading block does not mean A is singular.  Precondition
        # with a unit-triangular product R (det R = 1) so that R*A has
        # nonsingular leading blocks with high probability; Gauss-Jordan
        # settles the rare remaining cases exactly.
        rng = np.random.default_rng(n)
        lower = np.tril(self.random(rng, (n, n)), -1) + np.eye(n, dtype=np.int64)
        upper = np.triu(self.random(rng, (n, n)), 1) + np.eye(n, dtype=np.int64)
        r = self.matmul(lower, upper)
        try:
            inv, det = self._schur_inverse(self.matmul(r, a))
            return self.matmul(inv, r), det
        except Singular:
            return self.gauss_jordan(a)

    def _schur_inverse(self, a: np.ndarray) -> tuple[np.ndarray, int]:
        n = a.shape[0]
        if n <= _SCHUR_BASE:
            return self.gauss_jordan(a)
        h = n // 2
        a11, a12, a21, a22 = a[:h, :h], a[:h, h:], a[h:, :h], a[h:, h:]
        i11, d11 = self._schur_inverse(a11)
        x = self.matmul(i11, a12)            # A11^-1 A12
        y = self.matmul(a21, i11)            # A21 A11^-1
        s = self.sub(a22, self.matmul(a21, x))
        si, ds = self._schur_inverse(s)
        top_right = self.neg(self.matmul(x, si))
        bottom_left = self.neg(self.matmul(si, y))
        top_left = self.sub(i11, self.matmul(top_right, y))
        out = np.empty_like(a)
        out[:h, :h] = top_left
        out[:h, h:] = top_right
        out[h:, :h] = bottom_left
        out[h:, h:] = si
        return out, d11 * ds % self.p

    def inv(self, a: np.ndarray) -> np.ndarray:
        return self.gaussian_inverse(a)[0]

    def det(self, a: np.ndarray) -> int:
        try:
            return self.gaussian_inverse(a)[1]
        except Singular:
            return 0

    def rank(self, a: np.ndarray) -> int:
        m = np.array(a, dtype=np.int64) % self.p
        rows, cols = m.shape
        rank = 0
        for col in range(cols):
            if rank == rows:
                break
            nz = np.flatnonzero(m[rank:, col])
            if nz.size == 0:
                continue
            piv = rank + int(nz[0])
            if piv != rank:
                m[[rank, piv]] = m[[piv, rank]]
            row = self.scale(m[rank], pow(int(m[rank, col]), -1, self.p))
            m[rank] = row
            below = m[rank + 1:, col].copy()
            nzr = np.flatnonzero(below)
            if nzr.size:
                idx = rank + 1 + nzr
                m[idx] = (m[idx] - self.mulmod(below[nzr, None], row[None, :])) % self.p
            rank += 1
        return rank


class PolyRing:
    """Z_p[X]/<X^m>; matrices carry a trailing coefficient axis of length m."""

    def __init__(self, field: PrimeField | int, m: int):
        if not isinstance(field, PrimeField):
            field = PrimeField(field)
        if m < 1:
            raise ValueError("truncation order must be positive")
        self.field = field
        self.p = field.p
        self.m = int(m)
        self.tail = (self.m,)

    def __repr__(self) -> str:
        return f"PolyRing(p={self.p}, m={self.m})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyRing) and other.p == self.p and other.m == self.m

    def __hash__(self) -> int:
        return hash(("poly", self.p, self.m))

    # -- scalars (arrays of shape (m,)) ---------------------------------
    def one(self) -> np.ndarray:
        x = np.zeros(self.m, dtype=np.int64)
        x[0] = 1
        return x

    def zero(self) -> np.ndarray:
        return np.zeros(self.m, dtype=np.int64)

    def scalar(self, x) -> np.ndarray:
        return np.asarray(x, dtype=np.int64).reshape(self.m) % self.p

    def lift(self, v) -> np.ndarray:
        if np.ndim(v) == 0:
            x = self.zero()
            x[0] = int(v) % self.p
            return x
        return TruncatedPoly.of(v, self).as_array()

    def smul(self, x, y) -> np.ndarray:
        return _conv(self.field, np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64), self.m)

    def sadd(self, x, y) -> np.ndarray:
        return (np.asarray(x) + np.asarray(y)) % self.p

    def ssub(self, x, y) -> np.ndarray:
        return (np.asarray(x) - np.asarray(y)) % self.p

    def sinv(self, x) -> np.ndarray:
        return _series_inverse(self.field, np.asarray(x, dtype=np.int64), self.m)

    def is_zero(self, x) -> bool:
        return not np.any(np.asarray(x) % self.p)

    def is_unit(self, x) -> bool:
        return int(np.asarray(x).reshape(self.m)[0]) % self.p != 0

    # -- arrays --------------------------------------------------------
    def zeros(self, r: int, c: int) -> np.ndarray:
        return np.zeros((r, c, self.m), dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        out = np.zeros((n, n, self.m), dtype=np.int64)
        out[np.arange(n), np.arange(n), 0] = 1
        return out

    def add(self, a, b) -> np.ndarray:
        return (a + b) % self.p

    def sub(self, a, b) -> np.ndarray:
        return (a - b) % self.p

    def neg(self, a) -> np.ndarray:
        return (-a) % self.p

    def random(self, rng: np.random.Generator, shape, nonzero: bool = False) -> np.ndarray:
        return self.field.random(rng, tuple(shape) + self.tail, nonzero)

    def scale(self, a, x) -> np.ndarray:
        """Multiply every entry of the matrix ``a`` by the scalar ``x``."""
        r, c = a.shape[:2]
        s = np.asarray(x, dtype=np.int64).reshape(1, 1, self.m)
        return self.matmul(a.reshape(r * c, 1, self.m), s).reshape(r, c, self.m)

    def matmul(self, a: np.ndarray, b: np.ndarray, base=None) -> np.ndarray:
        """Truncated convolution over degrees as one block-Toeplitz field product."""
        if a.shape[1] != b.shape[0]:
            raise DimensionMismatch(f"cannot multiply {a.shape[:2]} by {b.shape[:2]}")
        r, k, m = a.shape
        c = b.shape[1]
        if r == 0 or c == 0 or k == 0:
            return np.zeros((r, c, m), dtype=np.int64)
        mm = base if base is not None else self.field.matmul
        # a_flat[:, d*k:(d+1)*k] = coefficient d of a
        a_flat = np.transpose(a, (0, 2, 1)).reshape(r, m * k)
        toep = np.zeros((m * k, m * c), dtype=np.int64)
        for d in range(m):
            for e in range(d, m):
                toep[d * k:(d + 1) * k, e * c:(e + 1) * c] = b[:, :, e - d]
        out = mm(a_flat, toep)
        return np.transpose(out.reshape(r, m, c), (0, 2, 1)).copy()

    def constant_term(self, a: np.ndarray) -> np.ndarray:
        return a[..., 0]

    def check_unipotent(self, a: np.ndarray) -> None:
        n = a.shape[0]
        if a.shape[:2] != (n, n) or not np.array_equal(a[..., 0] % self.p, np.eye(n, dtype=np.int64)):
            raise NotUnipotent("matrix is not of the form I - X*N")

    def unipotent_inverse(self, a: np.ndarray) -> np.ndarray:
        """Inverse of I - X*N as the product of (I + Y^(2^j)), Y = X*N."""
        self.check_unipotent(a)
        n = a.shape[0]
        y = self.sub(self.eye(n), a)
        out = self.eye(n)
        span = 1
        while span < self.m:
            out = self.matmul(out, self.add(self.eye(n), y))
            span *= 2
            if span < self.m:
                y = self.matmul(y, y)
        return out

    def inv(self, a: np.ndarray) -> np.ndarray:
        # Pivot blocks met by the transformation algorithms are always of the
        # form I - X*N; anything else signals a broken invariant.
        return self.unipotent_inverse(a)

    def gaussian_inverse(self, a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Gauss-Jordan over the local ring: pivots are entries with unit constant term."""
        n = a.shape[0]
        if a.shape[:2] != (n, n):
            raise DimensionMismatch("square matrix required")
        p = self.p
        aug = np.concatenate([a % p, self.eye(n)], axis=1)
        det = self.one()
        for col in range(n):
            nz = np.flatnonzero(aug[col:, col, 0])
            if nz.size == 0:
                raise Singular("no unit pivot")
            piv = col + int(nz[0])
            if piv != col:
                aug[[col, piv]] = aug[[piv, col]]
                det = (-det) % p
            pv = aug[col, col].copy()
            det = self.smul(det, pv)
            row = self.scale(aug[col:col + 1], self.sinv(pv))
            aug[col] = row[0]
            factors = aug[:, col:col + 1].copy()
            factors[col] = 0
            aug = self.sub(aug, self.matmul(factors, row))
        return aug[:, n:].copy(), det

    def det(self, a: np.ndarray) -> np.ndarray:
        try:
            return self.gaussian_inverse(a)[1]
        except Singular:
            return _det_by_expansion(self, a)


def _det_by_expansion(ring: PolyRing, a: np.ndarray) -> np.ndarray:
    # Only reached for non-invertible polynomial matrices; small sizes only.
    n = a.shape[0]
    if n == 0:
        return ring.one()
    if n == 1:
        return a[0, 0] % ring.p
    total = ring.zero()
    for j in range(n):
        minor = np.delete(np.delete(a, 0, axis=0), j, axis=1)
        term = ring.smul(a[0, j], _det_by_expansion(ring, minor))
        total = ring.sadd(total, term) if j % 2 == 0 else ring.ssub(total, term)
    return total


def _conv(field: PrimeField, x: np.ndarray, y: np.ndarray, m: int) -> np.ndarray:
    out = np.zeros(m, dtype=np.int64)
    prod = field.mulmod(x[:, None], y[None, :])
    for d in range(m):
        idx = np.arange(d + 1)
        out[d] = int(np.sum(prod[idx, d - idx] % field.p, dtype=object) % field.p)
    return out


def _series_inverse(field: PrimeField, x: np.ndarray, m: int) -> np.ndarray:
    c0 = int(x[0]) % field.p
    if c0 == 0:
        raise NonUnit("constant coefficient is zero")
    inv0 = pow(c0, -1, field.p)
    out = [0] * m
    xs = [int(v) for v in x]
    p = field.p
    for d in range(m):
        acc = 1 if d == 0 else 0
        for i in range(1, d + 1):
            acc -= xs[i] * out[d - i]
        out[d] = acc * inv0 % p
    return np.array(out, dtype=np.int64)


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField

    def __post_init__(self):
        if not 0 <= self.value < self.field.p:
            raise ValueError("value must be reduced mod p")

    def _other(self, o) -> int:
        if isinstance(o, FieldElement):
            if o.field != self.field:
                raise ValueError("elements of different fields")
            return o.value
        return int(o) % self.field.p

    def __add__(self, o):
        return fe_add(self, self.field.element(self._other(o)))

    def __sub__(self, o):
        return fe_sub(self, self.field.element(self._other(o)))

    def __mul__(self, o):
        return fe_mul(self, self.field.element(self._other(o)))

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return self.field.element(-self.value)

    def inverse(self):
        return fe_inv(self)

    def __int__(self) -> int:
        return self.value

    def __eq__(self, o) -> bool:
        if isinstance(o, FieldElement):
            return self.field == o.field and self.value == o.value
        if isinstance(o, (int, np.integer)):
            return self.value == int(o) % self.field.p
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.value, self.field.p))


def _same_field(a: FieldElement, b: FieldElement) -> PrimeField:
    if a.field != b.field:
        raise ValueError("elements of different fields")
    return a.field


def fe_add(a: FieldElement, b: FieldElement) -> FieldElement:
    f = _same_field(a, b)
    return FieldElement((a.value + b.value) % f.p, f)


def fe_sub(a: FieldElement, b: FieldElement) -> FieldElement:
    f = _same_field(a, b)
    return FieldElement((a.value - b.value) % f.p, f)


def fe_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    f = _same_field(a, b)
    return FieldElement(a.value * b.value % f.p, f)


def fe_inv(a: FieldElement) -> FieldElement:
    if a.value == 0:
        raise ZeroInverse("zero has no inverse")
    return FieldElement(pow(a.value, -1, a.field.p), a.field)


@dataclass(frozen=True)
class TruncatedPoly:
    """Element of Z_p[X]/<X^m>; ``coeffs[k]`` is the coefficient of X^k."""

    coeffs: tuple[int, ...]
    field: PrimeField

    @property
    def m(self) -> int:
        return len(self.coeffs)

    @classmethod
    def of(cls, coeffs: Iterable, ring_or_field, m: int | None = None) -> "TruncatedPoly":
        field = ring_or_field.field if isinstance(ring_or_field, PolyRing) else ring_or_field
        if m is None and isinstance(ring_or_field, PolyRing):
            m = ring_or_field.m
        vals = [int(c) % field.p for c in coeffs]
        if m is not None:
            if len(vals) > m:
                vals = vals[:m]
            vals += [0] * (m - len(vals))
        return cls(tuple(vals), field)

    @property
    def elements(self) -> tuple[FieldElement, ...]:
        return tuple(FieldElement(c, self.field) for c in self.coeffs)

    def as_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int64)

    def __mul__(self, o):
        return poly_mul(self, o)

    def __add__(self, o):
        _check_poly_pair(self, o)
        return TruncatedPoly(tuple((x + y) % self.field.p for x, y in zip(self.coeffs, o.coeffs)), self.field)

    def __sub__(self, o):
        _check_poly_pair(self, o)
        return TruncatedPoly(tuple((x - y) % self.field.p for x, y in zip(self.coeffs, o.coeffs)), self.field)


def _check_poly_pair(a: TruncatedPoly, b: TruncatedPoly) -> None:
    if a.field != b.field or a.m != b.m:
        raise DimensionMismatch("polynomials from different rings")


def poly_mul(a: TruncatedPoly, b: TruncatedPoly) -> TruncatedPoly:
    _check_poly_pair(a, b)
    p, m = a.field.p, a.m
    out = [0] * m
    for i, x in enumerate(a.coeffs):
        if x:
            for j in range(m - i):
                out[i + j] += x * b.coeffs[j]
    return TruncatedPoly(tuple(v % p for v in out), a.field)


def poly_inv_unit(a: TruncatedPoly) -> TruncatedPoly:
    res = _series_inverse(a.field, np.array(a.coeffs, dtype=object), a.m)
    return TruncatedPoly(tuple(int(v) for v in res), a.field)


def poly_from_array(arr: Sequence[int], field: PrimeField) -> TruncatedPoly:
    return TruncatedPoly(tuple(int(v) % field.p for v in arr), field)
