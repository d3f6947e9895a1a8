"""Minimal supercuspidal representations through their epsilon data.

A representation pi_theta is described by a regular character theta of E'*
trivial on F*.  The Kirillov model is encoded by the constants
C_nu = eps(pi x nu^-1) and the shells n_nu = -max(c(pi), 2 c(nu)):

    pi(omega) 1_{nu,n} = C_nu 1_{nu^-1, -n + n_nu}.

Matrix coefficients of 1_{eta,0} on the conjugated torus are produced as a
list of (key, angle) terms: value = sum constant(key) * exp(2 pi i angle).
The constants depend only on the key, so torus integrals can bucket the
angles before doing any cyclotomic multiplication.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .characters import (
    EProduct,
    EpsilonOutOfRange,
    MultChar,
    NormLift,
    alpha_of,
    alpha_of_E,
    chars_up_to,
    gauss_sum,
    is_regular,
    root,
    trivial_on_Fstar,
)
from .padic_base import INF, InvalidParameter, conjugated_torus_decompose, frac_mod, split, vp
from .values import EXACT


class GaloisFixed(InvalidParameter):
    pass


class NontrivialCentral(InvalidParameter):
    pass


class LevelMismatch(InvalidParameter):
    pass


class ScDatum:
    """pi_theta for theta on E' = F(sqrt D'), with cached epsilon data."""

    def __init__(self, params, theta, c_pi, n_theta, backend=EXACT):
        self.params = params
        self.theta = theta
        self.c_pi = c_pi
        self.n_theta = n_theta
        self.backend = backend
        self._C = {}
        self._vectors = {}
        self._const = {}

    @property
    def p(self):
        return self.params.p

    @property
    def e(self):
        return self.params.e

    @property
    def k(self):
        return self.c_pi // 2

    @property
    def L(self):
        """F-side level at which Kirillov basis characters are indexed."""
        return self.c_pi

    def char(self, s):
        return MultChar(self.p, self.L, s)

    def lift(self, chi):
        return chi.at_level(self.L) if chi.conductor <= self.L else chi

    def in_range(self, nu):
        c = nu.conductor
        return c == 0 or self.e * c - self.e + 1 <= self.n_theta

    def C(self, nu):
        nu = self.lift(nu)
        if nu.s not in self._C:
            if not self.in_range(nu):
                raise EpsilonOutOfRange(nu.conductor, self.k)
            self._C[nu.s] = epsilon_factor(self, nu.inverse())
        return self._C[nu.s]

    def n_nu(self, nu):
        return -max(self.c_pi, 2 * nu.conductor)

    def __repr__(self):
        return f"ScDatum(p={self.p}, {self.params.ext_kind}, c_pi={self.c_pi}, theta={self.theta!r})"


def build_sc(params, theta, backend=EXACT):
    if not trivial_on_Fstar(theta):
        raise NontrivialCentral("theta must be trivial on F*")
    if not is_regular(theta):
        raise GaloisFixed("theta is fixed by the Galois conjugation")
    n = theta.conductor
    if params.e == 1:
        if n < 1:
            raise LevelMismatch("inert theta must be ramified")
        c_pi = 2 * n
    else:
        if n < 2 or n % 2:
            raise LevelMismatch(f"ramified theta needs even level >= 2, got {n}")
        c_pi = n + 1
    return ScDatum(params, theta, c_pi, n, backend)


def epsilon_table(sc):
    """{nu index at level c_pi: (C_nu, n_nu)} for every in-range nu."""
    return {nu.s: (sc.C(nu), sc.n_nu(nu)) for nu in chars_up_to(sc.p, sc.k, sc.L)}


# ------------------------------------------------------------ epsilon factors


def _e_units(params, m):
    """Coordinates (A, B) of the units of O_E / varpi_E^m."""
    p = params.p
    if params.e == 1:
        A, B = np.meshgrid(np.arange(p**m), np.arange(p**m), indexing="ij")
        A, B = A.ravel(), B.ravel()
        keep = (A % p != 0) | (B % p != 0)
    else:
        A, B = np.meshgrid(np.arange(p ** ((m + 1) // 2)), np.arange(p ** (m // 2)), indexing="ij")
        A, B = A.ravel(), B.ravel()
        keep = A % p != 0
    return A[keep].astype(np.int64), B[keep].astype(np.int64)


def _uniformizer_power(params, n):
    """varpi_E^n as Fraction coordinates."""
    p, D = params.p, Fraction(params.D)
    if params.e == 1:
        return Fraction(p) ** n, Fraction(0)
    h, odd = divmod(n, 2)
    if odd:
        return Fraction(0), D**h
    return D**h, Fraction(0)


def e_gauss(chi, shell, backend=EXACT):
    """int_{O_E*} chi(u) psi_E(varpi_E^shell u) d*u with Vol(O_E*) = 1."""
    params = chi.params
    p, D = params.p, params.D
    c = chi.conductor
    m = max(c, -shell - (params.e - 1), 1)
    A, B = _e_units(params, m)
    nums, order = chi.unit_angles(A, B)
    w1, w2 = _uniformizer_power(params, shell)
    # Tr((A + B sqrt D)(w1 + w2 sqrt D)) = 2 (A w1 + B w2 D)
    X, Y = 2 * w1, 2 * w2 * D
    R = max(0, -min(vp(X, p) if X else 0, vp(Y, p) if Y else 0))
    P = p**R
    Xi = frac_mod(X * P, p, R) if R and X else 0
    Yi = frac_mod(Y * P, p, R) if R and Y else 0
    tr = (A % P * Xi + B % P * Yi) % P if R else np.zeros_like(A)
    M = order * P // math.gcd(order, P)
    exps = (nums * (M // order) + tr * (M // P)) % M
    return backend.root_sum(M, exps, den=len(A))


def epsilon_factor(sc, eta):
    """eps(pi_theta x eta, 1/2, psi) from the Gauss integral over E'*."""
    params, backend = sc.params, sc.backend
    e, p = params.e, params.p
    ce = eta.conductor
    if ce and e * ce - e + 1 > sc.n_theta:
        raise EpsilonOutOfRange(ce, sc.k)
    chi = EProduct((sc.theta, NormLift(eta, params)))
    n2 = chi.conductor
    if n2 == 0:
        raise InvalidParameter("theta * eta_E is unramified")
    shell = -(n2 + e - 1)
    inv = chi.inverse()
    integral = e_gauss(inv, shell, backend)
    # (theta eta_E)^-1 (varpi_E^shell) for the shell factor x = varpi_E^shell u
    unif = root(-shell * inv.unif_angle(), backend)
    n = sc.n_theta
    if e == 1:
        sq = Fraction(p) ** n
    else:
        if n % 2:
            raise LevelMismatch("ramified theta of odd level")
        sq = Fraction(p) ** (n // 2)
    qE = params.qE
    pref = (-1) ** (e * n) * Fraction(qE - 1, qE) * sq
    return integral * unif * backend.rational(pref)


def c_quotient(sc, nu, eta):
    """nu_E((alpha_theta + alpha_eta varpi_E^(c+e-1) / p^c(eta)) / varpi_E^(c+e-1)), checked against C-ratios."""
    params, backend = sc.params, sc.backend
    e, p, D = params.e, params.p, params.D
    n = sc.n_theta
    if nu.conductor and e * nu.conductor - e + 1 > Fraction(n, 2):
        raise EpsilonOutOfRange(nu.conductor, n)
    if eta.conductor and e * eta.conductor - e + 1 > n:
        raise EpsilonOutOfRange(eta.conductor, n)
    if not nu.conductor:
        if not backend.equal(sc.C(nu * eta.inverse()), sc.C(eta.inverse())):
            raise AssertionError("C-quotient formula disagrees with the ratio of epsilon sums")
        return backend.one()
    at = alpha_of_E(sc.theta)
    ae = alpha_of(eta).alpha if eta.conductor >= 2 else 0
    w1, w2 = _uniformizer_power(params, n + e - 1)
    shift = Fraction(ae) / Fraction(p) ** eta.conductor
    x1, x2 = at[0] + shift * w1, at[1] + shift * w2
    # divide by varpi_E^(n+e-1)
    nrm = w1 * w1 - w2 * w2 * D
    y1, y2 = (x1 * w1 - x2 * w2 * D) / nrm, (x2 * w1 - x1 * w2) / nrm
    formula = NormLift(nu, params).value(y1, y2, backend)
    lhs = sc.C(nu * eta.inverse())
    rhs = formula * sc.C(eta.inverse())
    if not backend.equal(lhs, rhs):
        raise AssertionError("C-quotient formula disagrees with the ratio of epsilon sums")
    return formula


# ------------------------------------------------------------ Kirillov model


def basis_vector(sc, eta, n=0):
    return {(sc.lift(eta).s, n): sc.backend.one()}


def _add(vec, key, val, backend):
    if key in vec:
        vec[key] = vec[key] + val
    else:
        vec[key] = val


def _prune(vec, backend):
    return {k: v for k, v in vec.items() if not backend.is_zero(v)}


def kirillov_apply(sc, op, vec):
    """Apply ('diag', a1, a2), ('unip', m) or ('omega',) to a Kirillov vector."""
    backend = sc.backend
    p, L = sc.p, sc.L
    out = {}
    tag = op[0]
    if tag == "diag":
        a = Fraction(op[1]) / Fraction(op[2])
        v, u = split(a, p)
        for (s, n), coef in vec.items():
            _add(out, (s, n - v), coef * sc.char(s).value(u, backend), backend)
    elif tag == "unip":
        m = Fraction(op[1])
        for (s, n), coef in vec.items():
            t = m * Fraction(p) ** n
            j = -vp(t, p) if t else 0
            if j <= 0:
                _add(out, (s, n), coef, backend)
                continue
            if j > L:
                raise EpsilonOutOfRange(j, L)
            for chi in chars_up_to(p, j, L):
                g = gauss_sum(chi.inverse(), t, backend)
                if backend.is_zero(g):
                    continue
                _add(out, ((s + chi.s) % chi.order, n), coef * g, backend)
    elif tag == "omega":
        for (s, n), coef in vec.items():
            nu = sc.char(s)
            if not sc.in_range(nu):
                raise EpsilonOutOfRange(nu.conductor, sc.k)
            _add(out, ((-s) % nu.order, -n + sc.n_nu(nu)), coef * sc.C(nu), backend)
    else:
        raise InvalidParameter(f"unknown generator {tag!r}")
    return _prune(out, backend)


def pair_borel(sc, vec, alpha, m, eta):
    """<pi([[alpha, m], [0, 1]]) vec, 1_{eta,0}> as an exact value."""
    return sum_terms(sc, _pair_terms(sc, vec, alpha, m, eta, ("adhoc", id(vec))), {("adhoc", id(vec)): vec})


def _pair_terms(sc, vec, alpha, m, eta, tag):
    """Terms of the pairing; constants are coef * core Gauss sums (see _constant)."""
    p = sc.p
    va, ua = split(alpha, p)
    vm, um = split(m, p)
    j = max(-vm, 0) if m else 0
    eta_l = sc.lift(eta)
    terms = []
    for (s, n), _ in vec.items():
        if n != va:
            continue
        chi = sc.char(s)
        twist = chi * eta_l.inverse()
        if j == 0:
            if twist.conductor:
                continue
            ang = chi.angle(ua)
        else:
            if twist.conductor != j and not (j == 1 and twist.conductor == 0):
                continue
            ang = chi.angle(ua) - twist.angle(um)
        terms.append(((tag, s, n, twist.s, j), ang % 1))
    return terms


def _vector_constant(sc, vec, key, backend):
    _, s, n, ts, j = key
    twist = sc.char(ts)
    core = gauss_sum(twist, Fraction(1, sc.p**j) if j else Fraction(0), backend) if j else (
        backend.one() if twist.conductor == 0 else backend.zero())
    return vec[(s, n)] * core


def sum_terms(sc, terms, vectors=None):
    backend = sc.backend
    total = backend.zero()
    for key, ang in terms:
        total = total + constant(sc, key, vectors) * root(ang, backend)
    return total


def constant(sc, key, vectors=None):
    if key in sc._const:
        return sc._const[key]
    backend = sc.backend
    kind = key[0]
    if isinstance(kind, tuple):
        vec = (vectors or {}).get(kind) if kind[0] == "adhoc" else lower_vector(sc, kind[1], kind[2])[0]
        val = _vector_constant(sc, vec, key, backend)
        if kind[0] == "adhoc":
            return val
    elif kind == "cf1":
        _, eta_s, i, chi_s = key
        eta, chi = sc.char(eta_s), sc.char(chi_s)
        j = sc.c_pi - i
        m = Fraction(1, sc.p**j)
        g = gauss_sum(chi.inverse(), -m, backend) * gauss_sum(chi.inverse(), m, backend)
        val = sc.C(chi * eta.inverse()) * sc.C(eta) * g
    elif kind == "cf2":
        _, eta_s, i, chi_s = key
        eta, chi = sc.char(eta_s), sc.char(chi_s)
        m = Fraction(1, sc.p**i)
        g = gauss_sum(chi.inverse(), m, backend) * gauss_sum((eta * eta * chi).inverse(), m, backend)
        val = sc.C(eta * chi) * g
    elif kind == "one":
        val = backend.one()
    else:
        raise KeyError(key)
    sc._const[key] = val
    return val


def lower_vector(sc, eta_s, i):
    """(X, (alpha', m')) with pi(n^-(p^i)) 1_{eta,0} = pi([[alpha', m'], [0, 1]]) X."""
    key = (eta_s, i)
    if key not in sc._vectors:
        eta = sc.char(eta_s)
        v = basis_vector(sc, eta)
        p = sc.p
        if 2 * i >= sc.c_pi:
            # n^-(x) = -omega n(-x) omega; -1 acts trivially
            v = kirillov_apply(sc, ("omega",), v)
            v = kirillov_apply(sc, ("unip", -Fraction(p) ** i), v)
            v = kirillov_apply(sc, ("omega",), v)
            tail = (Fraction(1), Fraction(0))
        else:
            # n^-(p^i) = -diag(p^-i) n(1) omega n(1) diag(p^i)
            v = kirillov_apply(sc, ("diag", Fraction(p) ** i, 1), v)
            v = kirillov_apply(sc, ("unip", 1), v)
            v = kirillov_apply(sc, ("omega",), v)
            pi_ = Fraction(p) ** (-i)
            tail = (pi_, pi_)
        sc._vectors[key] = (v, tail)
    return sc._vectors[key]


def oracle_terms(sc, eta, a, b, d, torus=None):
    """Terms of Phi_eta at diag(p^d,1)^-1 (a + b sqrt D) diag(p^d,1), step by step."""
    torus = sc.params if torus is None else torus
    eta = sc.lift(eta)
    dec = conjugated_torus_decompose(a, b, d, torus)
    if dec.i == INF:
        return [(("one",), Fraction(0))]
    i = int(dec.i)
    vec, (a2, m2) = lower_vector(sc, eta.s, i)
    alpha = dec.alpha * a2
    m = dec.alpha * m2 + dec.m
    extra = eta.angle(dec.kappa) if dec.case == "upper" else Fraction(0)
    terms = _pair_terms(sc, vec, alpha, m, eta, ("orc", eta.s, i))
    return [(key, (ang + extra) % 1) for key, ang in terms]


def mc_oracle(sc, eta, a, b, d, torus=None):
    return sum_terms(sc, oracle_terms(sc, eta, a, b, d, torus))


def _branch_chars(sc, j):
    if j <= 0:
        return [sc.char(0)]
    if j == 1:
        return chars_up_to(sc.p, 1, sc.L)
    return [c for c in chars_up_to(sc.p, j, sc.L) if c.conductor == j]


def closed_form_terms(sc, eta, a, b, torus=None, branch=None):
    """Terms of the closed-form matrix coefficient at d = k."""
    torus = sc.params if torus is None else torus
    p, D, c = sc.p, Fraction(torus.D), sc.c_pi
    a, b = Fraction(a), Fraction(b)
    eta = sc.lift(eta)
    if eta.conductor * 2 > c:
        raise EpsilonOutOfRange(eta.conductor, c // 2)
    if b == 0:
        return [(("one",), Fraction(0))]
    if a == 0 or vp(b * D * Fraction(p) ** sc.k / a, p) < 0:
        raise InvalidParameter("closed form needs v(b D p^k / a) >= 0; pick another coset representative")
    i = min(vp(b * D * Fraction(p) ** sc.k / a, p), c)
    nrm = a * a - b * b * D
    if branch is None:
        branch = 1 if 2 * i >= c else 2
    terms = []
    if branch == 1:
        if 2 * i < c:
            raise InvalidParameter("first branch needs i >= c/2")
        base = eta.angle(nrm / (a * a))
        for chi in _branch_chars(sc, c - i):
            ang = base + (chi.angle(b * b * D / nrm) if chi.conductor else 0)
            terms.append((("cf1", eta.s, i, chi.s), ang % 1))
    else:
        if 2 * i > c:
            raise InvalidParameter("second branch needs i <= c/2")
        for chi in _branch_chars(sc, i):
            ang = (eta * chi).angle(a * a / nrm)
            terms.append((("cf2", eta.s, i, chi.s), ang % 1))
    return terms


def mc_closed_form(sc, eta, a, b, torus=None):
    val = sum_terms(sc, closed_form_terms(sc, eta, a, b, torus))
    torus_ = sc.params if torus is None else torus
    a, b = Fraction(a), Fraction(b)
    if b != 0 and 2 * vp(b * torus_.D * Fraction(sc.p) ** sc.k / a, sc.p) == sc.c_pi:
        other = sum_terms(sc, closed_form_terms(sc, eta, a, b, torus, branch=2))
        if not sc.backend.equal(val, other):
            raise AssertionError("closed-form branches disagree at i = c/2")
    return val
