"""Residue-ring arithmetic for F = Q_p and a quadratic extension E = F(sqrt D).

Elements of F are carried as exact ``Fraction`` objects wherever possible;
``ResidueElem`` and ``ExtElem`` are the truncated valuation-unit forms used at
the boundaries (CLI parameters, tests of the ring laws).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

INF = float("inf")


class InvalidPrime(ValueError):
    pass


class InvalidParameter(ValueError):
    pass


class PrecisionError(ArithmeticError):
    pass


def is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def vp(x, p):
    """p-adic valuation of an int or Fraction; inf for zero."""
    x = Fraction(x)
    if x == 0:
        return INF
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def split(x, p):
    """x = p^v * u with u a p-adic unit (Fraction); (inf, 0) for zero."""
    x = Fraction(x)
    v = vp(x, p)
    if v == INF:
        return INF, Fraction(0)
    return v, x / Fraction(p) ** v


def unit_residue(u, p, n):
    """Integer representative of the unit u (a Fraction) modulo p^n."""
    u = Fraction(u)
    mod = p**n
    return u.numerator * pow(u.denominator, -1, mod) % mod


def frac_mod(x, p, n):
    """x modulo p^n O for x in O (Fraction input), as an int."""
    x = Fraction(x)
    mod = p**n
    if x.denominator % p == 0:
        raise PrecisionError(f"{x} is not p-integral")
    return x.numerator * pow(x.denominator, -1, mod) % mod


@lru_cache(maxsize=None)
def primitive_root(p):
    """Smallest generator of (Z/p^2)*, hence of (Z/p^n)* for every n."""
    order = p * (p - 1)
    factors = [f for f in range(2, order + 1) if order % f == 0 and is_prime(f)]
    for g in range(2, p * p):
        if g % p and all(pow(g, order // f, p * p) != 1 for f in factors):
            return g
    raise InvalidPrime(p)


@dataclass(frozen=True)
class LocalFieldParams:
    p: int
    precision: int
    ext_kind: str
    D: int
    xi: int = 1

    @property
    def q(self):
        return self.p

    @property
    def e(self):
        return 2 if self.ext_kind == "ramified" else 1

    @property
    def vD(self):
        return 1 if self.ext_kind == "ramified" else 0

    @property
    def qE(self):
        return self.p * self.p if self.ext_kind == "inert" else self.p


def legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def make_params(p, ext_kind="inert", precision=6, D=None, xi=None):
    if not isinstance(p, int) or not is_prime(p):
        raise InvalidPrime(f"{p} is not prime")
    if p in (2, 3):
        raise InvalidPrime(f"p={p} is excluded; need p >= 5")
    if precision < 1:
        raise InvalidParameter("precision must be >= 1")
    if ext_kind == "inert":
        if D is None:
            D = next(a for a in range(2, p) if legendre(a, p) == -1)
        if legendre(D, p) != -1:
            raise InvalidParameter(f"D={D} is a square mod {p}; inert needs a non-residue unit")
        return LocalFieldParams(p, precision, "inert", D, 1)
    if ext_kind == "ramified":
        if D is not None:
            if vp(D, p) != 1:
                raise InvalidParameter("ramified D must have valuation 1")
            xi = D // p
        xi = 1 if xi is None else xi
        if xi % p == 0:
            raise InvalidParameter("xi must be a unit")
        return LocalFieldParams(p, precision, "ramified", p * xi, xi)
    raise InvalidParameter(f"unknown extension kind {ext_kind!r}")


@dataclass(frozen=True)
class ResidueElem:
    """x = p^val * unit, known modulo p^n O (absolute precision n)."""

    val: float
    unit: int
    n: int
    p: int

    @classmethod
    def from_fraction(cls, x, p, n):
        v, u = split(x, p)
        if v >= n:
            return cls(n, 0, n, p)
        return cls(v, unit_residue(u, p, n - v), n, p)

    def is_zero(self):
        return self.unit == 0

    def to_fraction(self):
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def _check(self, other):
        if self.p != other.p:
            raise PrecisionError("mixed primes")

    def __add__(self, other):
        self._check(other)
        n = min(self.n, other.n)
        return ResidueElem.from_fraction(self.to_fraction() + other.to_fraction(), self.p, n)

    def __neg__(self):
        return ResidueElem.from_fraction(-self.to_fraction(), self.p, self.n)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        if self.is_zero() or other.is_zero():
            n = min(self.n, other.n)
            return ResidueElem(n, 0, n, self.p)
        # relative precision of a product is the smaller relative precision
        rel = min(self.n - self.val, other.n - other.val)
        val = self.val + other.val
        return ResidueElem.from_fraction(self.to_fraction() * other.to_fraction(), self.p, val + rel)

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("zero residue")
        rel = self.n - self.val
        return ResidueElem.from_fraction(1 / self.to_fraction(), self.p, -self.val + rel)


@dataclass(frozen=True)
class ExtElem:
    """a + b sqrt(D) with a, b truncated elements of F."""

    a: ResidueElem
    b: ResidueElem
    D: int

    @property
    def precision(self):
        return min(self.a.n, self.b.n)

    @classmethod
    def from_fractions(cls, a, b, params, n=None):
        n = params.precision if n is None else n
        return cls(ResidueElem.from_fraction(a, params.p, n), ResidueElem.from_fraction(b, params.p, n), params.D)


def _same_field(x, y):
    if x.D != y.D:
        raise PrecisionError("elements of different extensions")
    if x.precision != y.precision:
        raise PrecisionError(f"precision mismatch {x.precision} vs {y.precision}")


def ext_mul(x, y):
    _same_field(x, y)
    D = ResidueElem.from_fraction(x.D, x.a.p, x.precision + 2)
    return ExtElem(x.a * y.a + x.b * y.b * D, x.a * y.b + x.b * y.a, x.D)


def ext_conj(x):
    return ExtElem(x.a, -x.b, x.D)


def ext_norm(x):
    D = ResidueElem.from_fraction(x.D, x.a.p, x.precision + 2)
    return x.a * x.a - x.b * x.b * D


def ext_val(x):
    """Valuation on the E scale (v_E(varpi_E) = 1)."""
    p = x.a.p
    va = x.a.val if not x.a.is_zero() else INF
    vb = x.b.val if not x.b.is_zero() else INF
    if vp(x.D, p) == 0:
        return min(va, vb)
    return min(2 * va, 2 * vb + 1)


def norm_frac(a, b, D):
    return Fraction(a) ** 2 - Fraction(b) ** 2 * D


def ext_valuation(a, b, params):
    """v_E of a + b sqrt D for Fraction coordinates."""
    va, vb = vp(a, params.p), vp(b, params.p)
    if params.e == 1:
        return min(va, vb)
    return min(2 * va, 2 * vb + 1)


# 2x2 matrices as tuples ((a, b), (c, d)) of Fractions


def mat(a, b, c, d):
    return ((Fraction(a), Fraction(b)), (Fraction(c), Fraction(d)))


def mat_mul(x, y):
    return (
        (x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
        (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]),
    )


def mat_inv(x):
    det = x[0][0] * x[1][1] - x[0][1] * x[1][0]
    if det == 0:
        raise InvalidParameter("singular matrix")
    return ((x[1][1] / det, -x[0][1] / det), (-x[1][0] / det, x[0][0] / det))


def mat_det(x):
    return x[0][0] * x[1][1] - x[0][1] * x[1][0]


def lower_unipotent(x):
    return mat(1, 0, x, 1)


def in_k0(kappa, c, p):
    """kappa in K_0(p^c): integral, unit determinant, lower-left in p^c."""
    (a, b), (cc, d) = kappa
    if min(vp(a, p), vp(b, p), vp(d, p)) < 0:
        return False
    return vp(cc, p) >= c and vp(mat_det(kappa), p) == 0


def in_k11(g, lower, upper, p):
    """g in K_1^1(p^lower, p^upper): diagonal in 1+p^upper, upper-right in p^upper, lower-left in p^lower."""
    (a, b), (c, d) = g
    return (
        vp(a - 1, p) >= upper
        and vp(d - 1, p) >= upper
        and vp(b, p) >= upper
        and vp(c, p) >= lower
    )


@dataclass(frozen=True)
class IwasawaPart:
    borel: tuple
    i: int
    k0: tuple


def iwasawa_decompose(g, c, p):
    """g = B * n^-(p^i) * kappa with B upper triangular, kappa in K_0(p^c), 0 <= i <= c."""
    g = tuple(tuple(Fraction(x) for x in row) for row in g)
    if mat_det(g) == 0:
        raise InvalidParameter("singular matrix")
    C, D = g[1]
    if D != 0 and vp(C / D, p) >= c:
        i = c
        t = C / D
        kappa = lower_unipotent(t - Fraction(p) ** c)
        borel = mat_mul(g, lower_unipotent(-t))
    elif D != 0 and vp(C / D, p) >= 0:
        i = vp(C / D, p)
        u = C / D / Fraction(p) ** i
        kappa = mat(u, 0, 0, 1)
        borel = mat_mul(mat_mul(g, lower_unipotent(-C / D)), mat(1 / u, 0, 0, 1))
    else:
        i = 0
        kappa = mat(1, D / C - 1, 0, 1)
        borel = mat_mul(mat_mul(g, mat_inv(kappa)), lower_unipotent(-1))
    if borel[1][0] != 0:
        raise PrecisionError("decomposition failed to reach the Borel subgroup")
    return IwasawaPart(borel, i, kappa)


def torus_matrix(a, b, d, D, p):
    """diag(p^d,1)^-1 (a + b sqrt D) diag(p^d,1) in GL_2(F)."""
    pd = Fraction(p) ** d
    return mat(a, Fraction(b) / pd, Fraction(b) * D * pd, a)


@dataclass(frozen=True)
class TorusDecomposition:
    """Conjugated torus element = z * [[alpha, m], [0, 1]] * n^-(p^i) * right.

    upper case: right = diag(kappa, 1) with kappa a unit.
    lower case: i = 0 and right = n(r) with r integral.
    """

    case: str
    i: float
    z: Fraction
    alpha: Fraction
    m: Fraction
    kappa: Fraction = Fraction(1)
    r: Fraction = Fraction(0)

    def matrix(self, p):
        left = mat(self.z * self.alpha, self.z * self.m, 0, self.z)
        i = self.i
        if i == INF:
            return left
        mid = lower_unipotent(Fraction(p) ** i)
        right = mat(self.kappa, 0, 0, 1) if self.case == "upper" else mat(1, self.r, 0, 1)
        return mat_mul(mat_mul(left, mid), right)


def conjugated_torus_decompose(a, b, d, params):
    p, D = params.p, params.D
    a, b = Fraction(a), Fraction(b)
    if a == 0 and b == 0:
        raise InvalidParameter("zero torus element")
    pd = Fraction(p) ** d
    if b == 0:
        return TorusDecomposition("upper", INF, a, Fraction(1), Fraction(0))
    if a != 0 and vp(b * D * pd / a, p) >= 0:
        i = vp(b * D * pd / a, p)
        pi = Fraction(p) ** (i - d)
        alpha = (a * a - b * b * D) / (a * b * D) * pi
        m = b / (a * pd)
        kappa = b * D / (a * pi)
        return TorusDecomposition("upper", i, a, alpha, m, kappa=kappa)
    z = b * D * pd
    alpha = (a * a - b * b * D) / (b * b * D * D * pd * pd)
    r = a / z
    return TorusDecomposition("lower", 0, z, alpha, r - alpha, r=r - 1)


@dataclass(frozen=True)
class TorusCosets:
    """Representatives (a, b) for F*\\E*/(1 + p^k O_E) (inert) or (1 + varpi_E^{2k} O_E) (ramified)."""

    ext_kind: str
    k: int
    points: tuple

    @property
    def weight(self):
        return Fraction(1, len(self.points))


@lru_cache(maxsize=None)
def torus_cosets(p, ext_kind, k):
    if k < 1:
        raise InvalidParameter("coset depth must be >= 1")
    pk = p**k
    if ext_kind == "inert":
        pts = [(Fraction(1), Fraction(b)) for b in range(0, pk, p)]
        pts += [(Fraction(a), Fraction(1)) for a in range(pk)]
    else:
        pts = [(Fraction(1), Fraction(b)) for b in range(pk)]
        pts += [(Fraction(a), Fraction(1)) for a in range(0, pk * p, p)]
    return TorusCosets(ext_kind, k, tuple(pts))


def coset_count(p, ext_kind, k):
    return (p + 1) * p ** (k - 1) if ext_kind == "inert" else 2 * p**k
