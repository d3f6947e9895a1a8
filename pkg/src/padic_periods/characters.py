"""Characters of F = Q_p and of a quadratic extension E, at finite level.

Multiplicative characters of F* are extended by chi(p) = 1 and indexed by an
exponent s on the fixed generator g of (Z/p^L)*: chi(g^t) = exp(2 pi i s t / N_L)
with N_L = (p-1) p^(L-1).

Characters of E* are written as

    chi(x) = tau(xbar) * psi_E(beta * log<x>),   chi(varpi_E) = unif,

where xbar is the residue of a unit x, <x> its principal-unit part and
tau a character of the residue field k_E*.  All values are roots of unity
and are handed around as angles (Fractions modulo 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .padic_base import INF, InvalidParameter, PrecisionError, frac_mod, primitive_root, split, vp
from .values import EXACT

# ---------------------------------------------------------------- helpers


def angle_root_sum(angles, weights=None, backend=EXACT, den=1):
    """sum_i w_i exp(2 pi i angle_i) / den for Fraction angles."""
    angles = list(angles)
    if not angles:
        return backend.zero()
    M = 1
    for a in angles:
        M = M * a.denominator // math.gcd(M, a.denominator)
    exps = np.array([a.numerator * (M // a.denominator) for a in angles], dtype=np.int64)
    return backend.root_sum(M, exps, weights, den)


def root(angle, backend=EXACT):
    angle = Fraction(angle) % 1
    return backend.zeta(angle.denominator, angle.numerator)


@lru_cache(maxsize=None)
def dlog_table(p, L):
    """t with g^t = x mod p^L, or -1 when p | x."""
    P = p**L
    N = (p - 1) * p ** (L - 1)
    g = primitive_root(p)
    table = np.full(P, -1, dtype=np.int64)
    powers = np.empty(N, dtype=np.int64)
    x = 1
    for t in range(N):
        powers[t] = x
        x = x * g % P
    table[powers] = np.arange(N, dtype=np.int64)
    return table


@lru_cache(maxsize=None)
def unit_powers(p, L):
    """g^t mod p^L for t = 0 .. N_L - 1."""
    table = dlog_table(p, L)
    out = np.empty((p - 1) * p ** (L - 1), dtype=np.int64)
    idx = np.nonzero(table >= 0)[0]
    out[table[idx]] = idx
    return out


def psi_angle(x, p):
    """psi(x) = exp(2 pi i {x}_p) for x in Q."""
    x = Fraction(x)
    v = vp(x, p)
    if v >= 0:
        return Fraction(0)
    j = -v
    num = frac_mod(x * Fraction(p) ** j, p, j)
    return Fraction(num, p**j)


def eval_add(x, p, backend=EXACT):
    """psi(x) as an exact root of unity."""
    return root(psi_angle(x, p), backend)


def eval_add_E(a, b, params, backend=EXACT):
    """psi_E(a + b sqrt D) = psi(2a)."""
    return eval_add(2 * Fraction(a), params.p, backend)


# ---------------------------------------------------------------- F side


@dataclass(frozen=True)
class AlphaConstant:
    alpha: int
    modulus: int
    conductor: int


class EpsilonOutOfRange(ValueError):
    def __init__(self, conductor, limit):
        super().__init__(f"twist of conductor {conductor} is outside the modelled range (<= {limit})")
        self.conductor = conductor
        self.limit = limit


class MultChar:
    """Character of F* with chi(p) = 1, given by index s at level L."""

    __slots__ = ("p", "L", "s", "conductor")

    def __init__(self, p, L, s):
        self.p = p
        self.L = max(int(L), 1)
        self.s = int(s) % self.order
        self.conductor = self._conductor()

    @property
    def order(self):
        return (self.p - 1) * self.p ** (self.L - 1)

    def _conductor(self):
        if self.s == 0:
            return 0
        v, s = 0, self.s
        while s % self.p == 0:
            s //= self.p
            v += 1
        return max(1, self.L - v)

    @classmethod
    def trivial(cls, p, L=1):
        return cls(p, L, 0)

    @classmethod
    def quadratic(cls, p, L=1):
        return cls(p, L, ((p - 1) // 2) * p ** (max(L, 1) - 1))

    def at_level(self, L):
        if L == self.L:
            return self
        if L > self.L:
            return MultChar(self.p, L, self.s * self.p ** (L - self.L))
        if self.conductor > L:
            raise InvalidParameter(f"conductor {self.conductor} does not fit level {L}")
        return MultChar(self.p, L, self.s // self.p ** (self.L - L))

    def key(self):
        c = max(self.conductor, 1)
        return (self.p, self.at_level(c).s if self.conductor else 0)

    def __eq__(self, other):
        return isinstance(other, MultChar) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"MultChar(p={self.p}, L={self.L}, s={self.s}, c={self.conductor})"

    def __mul__(self, other):
        L = max(self.L, other.L)
        return MultChar(self.p, L, self.at_level(L).s + other.at_level(L).s)

    def __pow__(self, n):
        return MultChar(self.p, self.L, self.s * n)

    def inverse(self):
        return MultChar(self.p, self.L, -self.s)

    def unit_exps(self, units):
        """Exponents e with chi(u) = zeta_order^e, for an int array of units mod p^L."""
        t = dlog_table(self.p, self.L)[np.asarray(units, dtype=np.int64) % self.p**self.L]
        if np.any(t < 0):
            raise InvalidParameter("non-unit argument")
        return self.s * t % self.order

    def angle(self, x):
        """chi(x) as a Fraction angle; x a nonzero rational."""
        v, u = split(x, self.p)
        if v == INF:
            raise InvalidParameter("character evaluated at 0")
        if self.s == 0:
            return Fraction(0)
        r = frac_mod(u, self.p, self.L)
        t = int(dlog_table(self.p, self.L)[r])
        return Fraction(self.s * t % self.order, self.order)

    def value(self, x, backend=EXACT):
        return root(self.angle(x), backend)

    def is_quadratic(self):
        return self.conductor == 1 and (2 * self.s) % self.order == 0


def enumerate_chars(p, n, level=None):
    """All characters of (Z/p^n)*, each once; optionally only those of exact conductor."""
    n = max(n, 1)
    chars = [MultChar(p, n, s) for s in range((p - 1) * p ** (n - 1))]
    if level is not None:
        chars = [c for c in chars if c.conductor == level]
    return chars


def chars_up_to(p, level, L):
    """Characters of conductor <= level, expressed at level L (deterministic order)."""
    if level == 0:
        return [MultChar(p, L, 0)]
    step = p ** (L - level)
    return [MultChar(p, L, s) for s in range(0, (p - 1) * p ** (L - 1), step)]


def brute_conductor(chi):
    """Least m with chi trivial on 1 + p^m (exhaustive check)."""
    p, L = chi.p, chi.L
    P = p**L
    units = unit_powers(p, L)
    if np.all(chi.unit_exps(units) == 0):
        return 0
    for m in range(1, L + 1):
        shell = (1 + p**m * np.arange(p ** (L - m))) % P
        if np.all(chi.unit_exps(shell) == 0):
            return m
    return L


@lru_cache(maxsize=None)
def _gauss_core(p, s, L, j, backend):
    """(1/#) sum_{u mod p^L} chi_s(u) psi(u / p^j) with chi at level L."""
    N = (p - 1) * p ** (L - 1)
    if j <= 0:
        return backend.one() if s % N == 0 else backend.zero()
    M = N * p if j > L - 1 else N
    t = np.arange(N, dtype=np.int64)
    u = unit_powers(p, L)
    exps = (s * t % N) * (M // N) + (u % p**j) * (M // p**j)
    return backend.root_sum(M, exps % M, den=N)


def gauss_sum(chi, m, backend=EXACT):
    """int_{O*} psi(m u) chi(u) d*u with Vol(O*) = 1."""
    m = Fraction(m)
    p = chi.p
    if m == 0:
        return backend.one() if chi.conductor == 0 else backend.zero()
    v, mu = split(m, p)
    j = max(-v, 0)
    L = max(chi.conductor, j, 1)
    c = chi.at_level(L)
    core = _gauss_core(p, c.s, L, j, backend)
    if j == 0 or backend.is_zero(core):
        return core
    # substitute u -> u / mu
    return core * root(-c.angle(mu), backend)


def alpha_of(chi):
    """alpha with chi(1+x) = psi(alpha x / p^c) for v(x) >= ceil(c/2)."""
    c = chi.conductor
    if c < 2:
        raise InvalidParameter("alpha is defined for conductor >= 2")
    p = chi.p
    h = (c + 1) // 2
    mod = p ** (c - h)
    L = c
    ch = chi.at_level(L)
    a = ch.angle(1 + p**h)
    alpha = int(a * mod) % mod
    if Fraction(alpha, mod) != a:
        raise PrecisionError("character is not additive on the half shell")
    # verify on the whole shell x in p^h O / p^c O
    xs = p**h * np.arange(p ** (c - h), dtype=np.int64)
    got = ch.unit_exps(1 + xs)
    want = (alpha * xs) % p**c
    # chi angle s*t/N against psi angle want/p^c
    if np.any(got * p**c != want * ch.order):
        raise PrecisionError("alpha identity failed on the half shell")
    return AlphaConstant(alpha, mod, c)


def stationary_phase_shift(chi, nu, backend=EXACT):
    """Check int_{-c} chi nu psi = nu(-alpha_chi / p^c) int_{-c} chi psi; return the ratio."""
    c = chi.conductor
    if c < 2 * nu.conductor or c < 2:
        raise InvalidParameter("need c(chi) >= 2 c(nu) and c(chi) >= 2")
    p = chi.p
    m = Fraction(1, p**c)
    lhs = gauss_sum(chi * nu, m, backend)
    base = gauss_sum(chi, m, backend)
    alpha = alpha_of(chi).alpha
    ratio = nu.value(Fraction(-alpha, p**c), backend)
    if not backend.equal(lhs, ratio * base):
        raise AssertionError("stationary phase identity failed")
    return ratio


# ---------------------------------------------------------------- E side


def _e_mul(a1, b1, a2, b2, D, mod):
    return (a1 * a2 + b1 * b2 % mod * D) % mod, (a1 * b2 + b1 * a2) % mod


def _e_pow(a, b, n, D, mod):
    ra = np.ones_like(a)
    rb = np.zeros_like(b)
    while n:
        if n & 1:
            ra, rb = _e_mul(ra, rb, a, b, D, mod)
        a, b = _e_mul(a, b, a, b, D, mod)
        n >>= 1
    return ra, rb


@lru_cache(maxsize=None)
def residue_generator(p, D):
    """Generator G of F_{p^2}* = F_p(sqrt D)* whose norm is the F-side generator mod p."""
    g = primitive_root(p) % p
    order = p * p - 1
    primes = [f for f in range(2, order + 1) if order % f == 0 and all(f % r for r in range(2, f))]
    for a in range(p):
        for b in range(1, p):
            if (a * a - b * b * D) % p != g:
                continue
            ok = True
            for f in primes:
                x, y = _e_pow(np.array([a]), np.array([b]), order // f, D, p)
                if x[0] == 1 and y[0] == 0:
                    ok = False
                    break
            if ok:
                return a, b
    raise RuntimeError("no residue generator")


@lru_cache(maxsize=None)
def residue_dlog(p, D, inert):
    """Table over a + p*b (inert) or a (ramified) of the discrete log in k_E*."""
    if not inert:
        return dlog_table(p, 1)
    ga, gb = residue_generator(p, D)
    table = np.full(p * p, -1, dtype=np.int64)
    a, b = 1, 0
    for t in range(p * p - 1):
        table[a + p * b] = t
        a, b = (a * ga + b * gb * D) % p, (a * gb + b * ga) % p
    return table


def _log_principal(A, B, params, W):
    """log <x> modulo p^W for unit arrays x = A + B sqrt D (coordinates as ints)."""
    p, D = params.p, params.D
    mod = p ** (W + 2)
    qE1 = params.qE - 1
    ya, yb = _e_pow(A % mod, B % mod, qE1, D, mod)
    ya = (ya - 1) % mod
    la = np.zeros_like(ya)
    lb = np.zeros_like(yb)
    pa, pb = np.ones_like(ya), np.zeros_like(yb)
    J = params.e * (W + 2) + 2
    for j in range(1, J + 1):
        pa, pb = _e_mul(pa, pb, ya, yb, D, mod)
        jj, pv = j, 0
        while jj % p == 0:
            jj //= p
            pv += 1
        ta, tb = pa, pb
        if pv:
            if np.any(ta % p**pv) or np.any(tb % p**pv):
                raise PrecisionError("log series term not divisible")
            ta, tb = ta // p**pv, tb // p**pv
        inv = pow(jj, -1, mod)
        sgn = 1 if j % 2 else -1
        la = (la + sgn * (ta * inv % mod)) % mod
        lb = (lb + sgn * (tb * inv % mod)) % mod
    inv = pow(qE1, -1, mod)
    return la * inv % mod, lb * inv % mod


class ECharBase:
    """Common interface: unit angles, value at varpi_E, conductor on the E scale."""

    params = None

    def unit_angles(self, A, B):
        """(nums, order) with chi(A + B sqrt D) = zeta_order^nums, for unit arrays."""
        raise NotImplementedError

    def unif_angle(self):
        raise NotImplementedError

    # derived
    def angle(self, a, b):
        """chi(a + b sqrt D) for Fraction coordinates (nonzero element of E)."""
        p, D = self.params.p, self.params.D
        a, b = Fraction(a), Fraction(b)
        if a == 0 and b == 0:
            raise InvalidParameter("character evaluated at 0")
        if self.params.e == 1:
            v = min(vp(a, p), vp(b, p))
            ua, ub = a / Fraction(p) ** v, b / Fraction(p) ** v
        else:
            v = min(2 * vp(a, p), 2 * vp(b, p) + 1)
            ua, ub = a, b
            h = v // 2
            ua, ub = ua / Fraction(D) ** h, ub / Fraction(D) ** h
            if v % 2:
                # divide by sqrt D: (a + b sqrt D)/sqrt D = b + (a/D) sqrt D
                ua, ub = ub, ua / D
        W = self.working_precision()
        A = np.array([frac_mod(ua, p, W)], dtype=np.int64)
        B = np.array([frac_mod(ub, p, W)], dtype=np.int64)
        nums, order = self.unit_angles(A, B)
        return (Fraction(int(nums[0]), order) + v * self.unif_angle()) % 1

    def value(self, a, b, backend=EXACT):
        return root(self.angle(a, b), backend)

    def working_precision(self):
        return max(self.bound_level(), 1) + 2

    def bound_level(self):
        """An upper bound for the conductor on the E scale."""
        raise NotImplementedError

    def __mul__(self, other):
        return EProduct((self, other))

    def inverse(self):
        return EPower(self, -1)

    def galois(self):
        return EGalois(self)

    @property
    def conductor(self):
        return e_conductor(self)

    def same_as(self, other):
        return e_equal(self, other)


@lru_cache(maxsize=None)
def _principal_generators(p, D, e, m, W):
    """Generators of 1 + varpi_E^m O_E as coordinate arrays mod p^W."""
    P = p**W
    if e == 1:
        gens = [(1 + p**m, 0), (1, p**m)]
    else:
        h = m // 2
        if m % 2 == 0:
            gens = [(1 + p**h, 0), (1, p**h)]
        else:
            gens = [(1, p**h), (1 + p ** (h + 1), 0)]
    return np.array([g[0] % P for g in gens], dtype=np.int64), np.array([g[1] % P for g in gens], dtype=np.int64)


def _unit_generators(chi):
    p, D, e = chi.params.p, chi.params.D, chi.params.e
    W = chi.working_precision()
    if e == 1:
        ga, gb = residue_generator(p, D)
    else:
        ga, gb = primitive_root(p), 0
    A1, B1 = _principal_generators(p, D, e, 1, W)
    return np.concatenate([[ga], A1]), np.concatenate([[gb], B1])


def e_conductor(chi):
    """Least m >= 0 with chi trivial on 1 + varpi_E^m O_E (checked on generators)."""
    p, D, e = chi.params.p, chi.params.D, chi.params.e
    W = chi.working_precision()
    A, B = _unit_generators(chi)
    nums, _ = chi.unit_angles(A, B)
    if np.all(nums == 0):
        return 0
    top = e * W
    for m in range(1, top + 1):
        A, B = _principal_generators(p, D, e, m, W)
        nums, _ = chi.unit_angles(A, B)
        if np.all(nums == 0):
            return m
    raise PrecisionError("conductor exceeds working precision")


def e_equal(x, y):
    if x.params != y.params:
        return False
    if (x.unif_angle() - y.unif_angle()) % 1:
        return False
    A, B = _unit_generators(x if x.working_precision() >= y.working_precision() else y)
    na, oa = x.unit_angles(A, B)
    nb, ob = y.unit_angles(A, B)
    return all(Fraction(int(u), oa) == Fraction(int(v), ob) for u, v in zip(na, nb))


class EChar(ECharBase):
    """tau(xbar) * psi_E(beta log<x>) with tau = (generator -> zeta^s), chi(varpi_E) = exp(2 pi i unif)."""

    def __init__(self, params, s=0, beta=(0, 0), unif=Fraction(0)):
        self.params = params
        qE1 = params.qE - 1
        self.s = int(s) % qE1
        self.beta = (Fraction(beta[0]), Fraction(beta[1]))
        self.unif = Fraction(unif) % 1
        r = max(0, -vp(self.beta[0], params.p) if self.beta[0] else 0, -vp(self.beta[1], params.p) if self.beta[1] else 0)
        self._r = r
        self._B = (int(self.beta[0] * params.p**r), int(self.beta[1] * params.p**r))
        if self._B[0] != self.beta[0] * params.p**r or self._B[1] != self.beta[1] * params.p**r:
            raise InvalidParameter("beta must have p-power denominators")

    def __repr__(self):
        return f"EChar(s={self.s}, beta={self.beta}, unif={self.unif})"

    def bound_level(self):
        # v_E(beta) >= -(c + e - 1)
        vE = INF
        p, e = self.params.p, self.params.e
        if self.beta[0]:
            vE = min(vE, e * vp(self.beta[0], p))
        if self.beta[1]:
            vE = min(vE, e * vp(self.beta[1], p) + (e - 1))
        if vE == INF:
            return 1
        return max(1, int(-vE - (e - 1)))

    def working_precision(self):
        return max(self._r, (self.bound_level() + 1) // self.params.e) + 2

    def unif_angle(self):
        return self.unif

    def unit_angles(self, A, B):
        p, D = self.params.p, self.params.D
        inert = self.params.e == 1
        qE1 = self.params.qE - 1
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        if inert:
            t = residue_dlog(p, D, True)[(A % p) + p * (B % p)]
        else:
            t = residue_dlog(p, D, False)[A % p]
        if np.any(t < 0):
            raise InvalidParameter("non-unit argument")
        r = self._r
        order = qE1 * p**r
        tame = (self.s * t % qE1) * p**r
        if r == 0 or self._B == (0, 0):
            return tame % order, order
        W = self.working_precision()
        la, lb = _log_principal(A, B, self.params, W)
        P = p**r
        # Tr(beta * l) * p^r = 2 (B1 la + B2 lb D)
        wild = 2 * ((self._B[0] % P) * (la % P) % P + (self._B[1] % P) * (lb % P) % P * (D % P)) % P
        return (tame + wild * qE1) % order, order


class NormLift(ECharBase):
    """chi_E = chi o N_{E/F}."""

    def __init__(self, chi, params):
        self.chi = chi
        self.params = params

    def __repr__(self):
        return f"NormLift({self.chi!r})"

    def bound_level(self):
        return self.params.e * self.chi.conductor

    def working_precision(self):
        return max(self.chi.conductor, 1) + 2

    def unif_angle(self):
        if self.params.e == 1:
            return Fraction(0)
        return self.chi.angle(-self.params.D)

    def unit_angles(self, A, B):
        p, D = self.params.p, self.params.D
        L = self.chi.L
        P = p**L
        A = np.asarray(A, dtype=np.int64) % P
        B = np.asarray(B, dtype=np.int64) % P
        N = (A * A - (B * B % P) * (D % P)) % P
        return self.chi.unit_exps(N), self.chi.order


class EProduct(ECharBase):
    def __init__(self, factors):
        self.factors = tuple(factors)
        self.params = self.factors[0].params
        for f in self.factors:
            if f.params != self.params:
                raise InvalidParameter("characters of different extensions")

    def bound_level(self):
        return max(f.bound_level() for f in self.factors)

    def working_precision(self):
        return max(f.working_precision() for f in self.factors)

    def unif_angle(self):
        return sum((f.unif_angle() for f in self.factors), Fraction(0)) % 1

    def unit_angles(self, A, B):
        parts = [f.unit_angles(A, B) for f in self.factors]
        order = 1
        for _, o in parts:
            order = order * o // math.gcd(order, o)
        tot = np.zeros(len(np.atleast_1d(A)), dtype=np.int64)
        for nums, o in parts:
            tot = (tot + nums * (order // o)) % order
        return tot, order


class EPower(ECharBase):
    def __init__(self, base, n):
        self.base = base
        self.n = n
        self.params = base.params

    def bound_level(self):
        return self.base.bound_level()

    def working_precision(self):
        return self.base.working_precision()

    def unif_angle(self):
        return (self.n * self.base.unif_angle()) % 1

    def unit_angles(self, A, B):
        nums, order = self.base.unit_angles(A, B)
        return (self.n * nums) % order, order


class EGalois(ECharBase):
    """chi o sigma, sigma the nontrivial automorphism of E/F."""

    def __init__(self, base):
        self.base = base
        self.params = base.params

    def bound_level(self):
        return self.base.bound_level()

    def working_precision(self):
        return self.base.working_precision()

    def unif_angle(self):
        if self.params.e == 1:
            return self.base.unif_angle()
        # sigma(sqrt D) = -sqrt D
        return (self.base.unif_angle() + self.base.angle(-1, 0)) % 1

    def unit_angles(self, A, B):
        return self.base.unit_angles(A, -np.asarray(B, dtype=np.int64))


def norm_lift(chi, params):
    return NormLift(chi, params)


def alpha_of_E(chi):
    """(a, b) with chi(1+x) = psi_E(alpha x / varpi_E^(c+e-1)) on v_E(x) >= ceil(c/2)."""
    if not isinstance(chi, EChar):
        raise InvalidParameter("alpha_of_E needs a native EChar")
    p, D, e = chi.params.p, chi.params.D, chi.params.e
    c = chi.conductor
    if c < 1:
        raise InvalidParameter("unramified character has no alpha")
    n = c + e - 1
    b1, b2 = chi.beta
    if e == 1:
        return b1 * Fraction(p) ** n, b2 * Fraction(p) ** n
    # varpi_E^n with n = 2h or 2h+1
    h = n // 2
    a, b = b1 * Fraction(p) ** h, b2 * Fraction(p) ** h
    if n % 2:
        a, b = b * D, a
    return a, b


def e_chars(params, m, trivial_on_F=True, unif_choices=None):
    """EChars of conductor <= m (E scale), deterministic order, deduplicated.

    With trivial_on_F the characters are trivial on F* (and on p).
    """
    p, e = params.p, params.e
    qE1 = params.qE - 1
    out = []
    if e == 1:
        R = max(m, 1)
        betas = [(Fraction(b1, p**R), Fraction(b2, p**R)) for b1 in range(p ** (R - 1)) for b2 in range(p ** (R - 1))]
    else:
        R = max((m + 2) // 2, 1)
        betas = []
        for b1 in range(p ** (R - 1)):
            for b2 in range(p ** (R - 1)):
                x1, x2 = Fraction(b1, p**R), Fraction(b2, p**R)
                vE = min(2 * vp(x1, p) if x1 else INF, 2 * vp(x2, p) + 1 if x2 else INF)
                if vE >= -(m + 1):
                    betas.append((x1, x2))
    if unif_choices is None:
        unif_choices = [Fraction(0)] if e == 1 else [Fraction(0), Fraction(1, 2)]
    for unif in unif_choices:
        for s in range(qE1 if m >= 1 else 1):
            for beta in betas:
                chi = EChar(params, s, beta, unif)
                if trivial_on_F and not trivial_on_Fstar(chi):
                    continue
                out.append(chi)
    out.sort(key=lambda c: (c.conductor, float(c.unif), c.s, c.beta))
    return out


def trivial_on_Fstar(chi):
    p = chi.params.p
    A = np.array([primitive_root(p), 1 + p], dtype=np.int64)
    nums, _ = chi.unit_angles(A, np.zeros(2, dtype=np.int64))
    if np.any(nums):
        return False
    return chi.angle(p, 0) == 0


def is_regular(theta):
    return not e_equal(theta, theta.galois())
