"""Exact arithmetic in cyclotomic fields Q(zeta_M), with a float mirror.

A value is stored sparsely over a canonical Q-basis of Q(zeta_M): the tensor
product, over the prime powers l^e || M, of the bases
{zeta_{l^e}^(s + t*l^(e-1)) : 0 <= s < l^(e-1), 0 <= t < l-1}.
Because the basis is canonical, equality and zero tests are exact.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

MAX_ORDER = 10**7

_FLOAT_EXACT = 2**52
_INT64_SAFE = 2**62


class CyclotomicOverflow(ArithmeticError):
    """Raised when a computation needs a root of unity of order above MAX_ORDER."""


class FloatValue(NamedTuple):
    re: float
    im: float

    def __complex__(self):
        return complex(self.re, self.im)


def _factor(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


@lru_cache(maxsize=None)
def _components(M):
    """(l, l^e, l^(e-1), CRT idempotent) for every prime power l^e || M."""
    comps = []
    for ell, e in _factor(M):
        pe = ell**e
        rest = M // pe
        idem = rest * pow(rest, -1, pe) % M if rest > 1 else 1 % M
        comps.append((ell, pe, pe // ell, idem))
    return tuple(comps)


def _coef_dtype(nums, blowup=1):
    bound = int(np.abs(nums).sum()) * blowup if len(nums) else 0
    return np.int64 if bound < _INT64_SAFE else object


def _aggregate(M, exps, nums):
    if len(exps) == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    if nums.dtype != object and int(np.abs(nums).sum()) < _FLOAT_EXACT and M <= 4 * len(exps) + 64:
        acc = np.bincount(exps, weights=nums.astype(np.float64), minlength=M)
        idx = np.nonzero(acc)[0]
        return idx.astype(np.int64), acc[idx].astype(np.int64)
    uniq, inv = np.unique(exps, return_inverse=True)
    acc = np.zeros(len(uniq), dtype=nums.dtype)
    np.add.at(acc, inv, nums)
    keep = acc != 0
    return uniq[keep], acc[keep]


def _canonical(M, exps, nums):
    """Rewrite sum nums[i]*zeta_M^exps[i] over the canonical basis."""
    exps = np.asarray(exps, dtype=np.int64) % M
    nums = np.asarray(nums)
    if nums.dtype != object:
        nums = nums.astype(np.int64)
    comps = _components(M)
    blowup = 1
    for ell, _, _, _ in comps:
        blowup *= max(ell - 1, 1)
    if nums.dtype != object and _coef_dtype(nums, blowup) is object:
        nums = nums.astype(object)
    exps, nums = _aggregate(M, exps, nums)
    for ell, pe, block, idem in comps:
        t = (exps % pe) // block
        bad = t == ell - 1
        if not bad.any():
            continue
        shifts = ((ell - 1 - np.arange(ell - 1, dtype=np.int64)) * (block * idem % M)) % M
        new_e = ((exps[bad][:, None] - shifts[None, :]) % M).ravel()
        new_n = np.repeat(-nums[bad], ell - 1)
        exps = np.concatenate([exps[~bad], new_e])
        nums = np.concatenate([nums[~bad], new_n])
        exps, nums = _aggregate(M, exps, nums)
    return exps, nums


def _gcd_all(nums, den):
    g = den
    for x in nums.tolist():
        g = math.gcd(g, int(x))
        if g == 1:
            break
    return g


class CycValue:
    """An exact element of Q(zeta_M)."""

    __slots__ = ("M", "exps", "nums", "den")

    def __init__(self, M, exps=(), nums=(), den=1, *, canonical=False):
        M = int(M)
        if M < 1:
            raise ValueError("cyclotomic order must be positive")
        if M > MAX_ORDER:
            raise CyclotomicOverflow(f"order {M} exceeds MAX_ORDER={MAX_ORDER}")
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        exps = np.asarray(exps, dtype=np.int64)
        nums = np.asarray(nums) if len(exps) else np.zeros(0, np.int64)
        if not canonical:
            exps, nums = _canonical(M, exps, nums)
        den = int(den)
        if den < 0:
            den, nums = -den, -nums
        g = _gcd_all(nums, den)
        if g > 1:
            nums = nums // g
            den //= g
        if nums.dtype == object and len(nums) and int(np.abs(nums).max()) < 2**60:
            nums = nums.astype(np.int64)
        self.M = M
        self.exps = exps
        self.nums = nums
        self.den = den

    # construction
    @classmethod
    def rational(cls, r):
        r = Fraction(r)
        if r == 0:
            return cls(1)
        return cls(1, [0], [r.numerator], r.denominator, canonical=True)

    @classmethod
    def zeta(cls, M, j=1):
        return cls(M, [int(j) % M], [1])

    @classmethod
    def root_sum(cls, M, exps, weights=None, den=1):
        """sum_i weights[i] * zeta_M^exps[i] / den."""
        exps = np.asarray(exps, dtype=np.int64) % M
        if weights is None:
            counts = np.bincount(exps, minlength=M) if M <= 4 * len(exps) + 64 else None
            if counts is not None:
                idx = np.nonzero(counts)[0]
                return cls(M, idx, counts[idx].astype(np.int64), den)
            weights = np.ones(len(exps), np.int64)
        return cls(M, exps, np.asarray(weights), den)

    # structure
    def lift(self, M):
        if M == self.M:
            return self
        if M % self.M:
            raise ValueError(f"cannot embed Q(zeta_{self.M}) into Q(zeta_{M})")
        return CycValue(M, self.exps * (M // self.M), self.nums, self.den)

    def _common(self, other):
        other = _coerce(other)
        M = self.M * other.M // math.gcd(self.M, other.M)
        return self.lift(M), other.lift(M)

    def is_zero(self):
        return len(self.exps) == 0

    def is_rational(self):
        return self.is_zero() or (len(self.exps) == 1 and self.exps[0] == 0)

    def as_rational(self):
        if not self.is_rational():
            raise ValueError("value is not rational")
        if self.is_zero():
            return Fraction(0)
        return Fraction(int(self.nums[0]), self.den)

    def eq_rational(self, r):
        return self.is_rational() and self.as_rational() == Fraction(r)

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, (CycValue, int, Fraction)):
            return NotImplemented
        a, b = self._common(other)
        den = a.den * b.den // math.gcd(a.den, b.den)
        nums = np.concatenate([_scale(a.nums, den // a.den), _scale(b.nums, den // b.den)])
        return CycValue(a.M, np.concatenate([a.exps, b.exps]), nums, den)

    __radd__ = __add__

    def __neg__(self):
        return CycValue(self.M, self.exps, -self.nums, self.den, canonical=True)

    def __sub__(self, other):
        if not isinstance(other, (CycValue, int, Fraction)):
            return NotImplemented
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            r = Fraction(other)
            if r == 0:
                return CycValue(1)
            return CycValue(self.M, self.exps, _scale(self.nums, r.numerator), self.den * r.denominator,
                            canonical=True)
        if not isinstance(other, CycValue):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return CycValue(1)
        a, b = self._common(other)
        if len(a.exps) < len(b.exps):
            a, b = b, a
        if len(b.exps) == 1 and b.exps[0] == 0:
            return a * Fraction(int(b.nums[0]), b.den)
        exps = ((a.exps[:, None] + b.exps[None, :]) % a.M).ravel()
        bound = int(np.abs(a.nums).max()) * int(np.abs(b.nums).max())
        if bound < _INT64_SAFE and a.nums.dtype != object and b.nums.dtype != object:
            nums = (a.nums[:, None] * b.nums[None, :]).ravel()
        else:
            nums = np.multiply.outer(a.nums.astype(object), b.nums.astype(object)).ravel()
        return CycValue(a.M, exps, nums, a.den * b.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if isinstance(other, CycValue) and other.is_rational():
            return self * (1 / other.as_rational())
        if isinstance(other, CycValue) and len(other.exps) == 1:
            # monomial: r * zeta^j
            r = Fraction(int(other.nums[0]), other.den)
            inv = CycValue(other.M, [-int(other.exps[0])], [1])
            return self * inv * (1 / r)
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = CycValue.rational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self):
        return CycValue(self.M, -self.exps, self.nums, self.den)

    def abs2(self):
        return self * self.conj()

    def __eq__(self, other):
        if not isinstance(other, (CycValue, int, Fraction)):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    # float embedding
    def to_complex(self):
        if self.is_zero():
            return 0j
        ang = 2 * math.pi * self.exps.astype(np.float64) / self.M
        coef = np.array([int(n) / self.den for n in self.nums.tolist()])
        re = math.fsum((coef * np.cos(ang)).tolist())
        im = math.fsum((coef * np.sin(ang)).tolist())
        return complex(re, im)

    def __complex__(self):
        return self.to_complex()

    def __repr__(self):
        if self.is_rational():
            return f"CycValue({self.as_rational()})"
        return f"CycValue(M={self.M}, terms={len(self.exps)}, ~{self.to_complex():.6g})"

    def to_json(self):
        """Rational string when rational, else the basis expansion."""
        if self.is_rational():
            return str(self.as_rational())
        return {
            "M": self.M,
            "den": self.den,
            "terms": [[int(e), str(n)] for e, n in zip(self.exps.tolist(), self.nums.tolist())],
        }


def _scale(nums, k):
    if k == 1:
        return nums
    if nums.dtype != object and len(nums) and int(np.abs(nums).max()) * abs(k) < _INT64_SAFE:
        return nums * k
    return nums.astype(object) * k


def _coerce(x):
    if isinstance(x, CycValue):
        return x
    return CycValue.rational(x)


def to_float(x):
    if isinstance(x, CycValue):
        z = x.to_complex()
    else:
        z = complex(x)
    return FloatValue(z.real, z.imag)


def legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


class ExactBackend:
    """Values in Q(zeta_M) with exact equality."""

    name = "exact"

    def zero(self):
        return CycValue(1)

    def one(self):
        return CycValue.rational(1)

    def rational(self, r):
        return CycValue.rational(r)

    def zeta(self, M, j=1):
        return CycValue.zeta(M, j)

    def root_sum(self, M, exps, weights=None, den=1):
        return CycValue.root_sum(M, exps, weights, den)

    def is_zero(self, x):
        return x.is_zero()

    def equal(self, x, y):
        return (x - y).is_zero()

    def conj(self, x):
        return x.conj()

    def is_rational(self, x):
        return x.is_rational()

    def as_rational(self, x):
        return x.as_rational()

    def to_complex(self, x):
        return x.to_complex()

    @lru_cache(maxsize=None)
    def sqrt_p(self, p):
        """sqrt(p) inside Q(zeta_4p), from the quadratic Gauss sum."""
        u = np.arange(1, p)
        signs = np.array([legendre(int(x), p) for x in u])
        g = CycValue.root_sum(p, u, signs)
        if p % 4 == 1:
            return g
        return g * CycValue.zeta(4, 3)


class FloatBackend:
    """Complex double mirror of ExactBackend."""

    name = "float"

    def __init__(self, tol=1e-9):
        self.tol = tol

    def zero(self):
        return 0j

    def one(self):
        return 1 + 0j

    def rational(self, r):
        return complex(float(Fraction(r)))

    def zeta(self, M, j=1):
        return cmath.exp(2j * math.pi * (j % M) / M)

    def root_sum(self, M, exps, weights=None, den=1):
        exps = np.asarray(exps, dtype=np.int64) % M
        vals = np.exp(2j * np.pi * exps / M)
        if weights is not None:
            vals = vals * np.asarray(weights, dtype=np.float64)
        return complex(np.sum(vals)) / float(den)

    def is_zero(self, x):
        return abs(x) <= self.tol

    def equal(self, x, y):
        return abs(x - y) <= self.tol

    def conj(self, x):
        return x.conjugate()

    def is_rational(self, x):
        return abs(x.imag) <= self.tol

    def as_rational(self, x):
        return x.real

    def to_complex(self, x):
        return complex(x)

    def sqrt_p(self, p):
        return complex(math.sqrt(p))


EXACT = ExactBackend()
FLOAT = FloatBackend()


def get_backend(name):
    if name == "exact":
        return EXACT
    if name == "float":
        return FLOAT
    raise ValueError(f"unknown backend {name!r}")
