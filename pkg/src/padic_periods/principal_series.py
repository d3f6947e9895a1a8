"""Ramified principal series pi(chi1, chi2) and the matrix coefficient of its newform.

Two independent evaluations are provided:

* the induced model, where f(n^-(y)) = 1 for v(y) >= n and
  Phi(g) = q^n * int_{p^n O} f(n^-(t) g) dt,
* the Whittaker model of pi(1, mu), built from the three branches W^(i)
  and paired shell by shell.

Both are normalized so that Phi(1) = 1.  Half-integral powers of q are
carried exactly through the backend's sqrt_p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .characters import MultChar, angle_root_sum, psi_angle, root
from .padic_base import InvalidParameter, PrecisionError, frac_mod, mat, mat_det, mat_mul, split, vp
from .values import EXACT


@dataclass
class PsDatum:
    """Ind(chi1 |.|^1/2, chi2 |.|^-1/2) with newform supported on B K_0(p^n)."""

    chi1: MultChar
    chi2: MultChar
    n: int
    backend: object = EXACT
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def p(self):
        return self.chi1.p

    @property
    def c_pi(self):
        return self.chi1.conductor + self.chi2.conductor

    @property
    def ratio(self):
        return self.chi2 * self.chi1.inverse()

    @property
    def central(self):
        return self.chi1 * self.chi2


def build_ps(mu, chi=None, backend=EXACT):
    """pi(1, mu), or its twist pi(chi, mu chi) realized with its own induced model."""
    if mu.conductor < 1:
        raise InvalidParameter("mu must be ramified")
    L = mu.L if chi is None else max(mu.L, chi.L)
    mu = mu.at_level(L)
    one = MultChar.trivial(mu.p, L)
    if chi is None:
        return PsDatum(one, mu, mu.conductor, backend)
    chi = chi.at_level(L)
    if 2 * chi.conductor > mu.conductor:
        raise InvalidParameter("twist must keep chi2/chi1 = mu as the only ramified ratio")
    return PsDatum(chi, mu * chi, mu.conductor, backend)


# ---------------------------------------------------------------- induced model


def _vp_array(x, p, cap):
    v = np.zeros(x.shape, dtype=np.int64)
    y = x.copy()
    live = y != 0
    v[~live] = cap
    for _ in range(cap):
        hit = live & (y % p == 0)
        if not hit.any():
            break
        y[hit] //= p
        v[hit] += 1
        live = hit
    return v, y


def _truncation(ps, g):
    (A, B), (C, D) = g
    p, n = ps.p, ps.n
    vdet = vp(mat_det(g), p)
    T = n
    if B:
        vB = vp(B, p)
        vA = vp(A, p) if A else vdet
        T = max(T, vdet - 2 * vB + n + 1, vdet - vA - vB + 1, vdet - 2 * vA + n + 1)
    else:
        T = max(T, vp(D, p) + n - vp(A, p) + 1)
    return T + 1


def induced_phi(ps, g, T=None):
    """Normalized <pi(g) f, f> in the induced model, exact."""
    p, n, backend = ps.p, ps.n, ps.backend
    g = tuple(tuple(Fraction(x) for x in row) for row in g)
    (A, B), (C, D) = g
    det = mat_det(g)
    if det == 0:
        raise InvalidParameter("singular matrix")
    T = _truncation(ps, g) if T is None else T
    if T > 14:
        raise PrecisionError(f"induced-model truncation {T} too deep")
    Q = 1
    for x in (A, B, C, D):
        Q = Q * x.denominator // np.gcd(Q, x.denominator)
    An, Bn, Cn, Dn = (int(x * Q) for x in (A, B, C, D))
    s = np.arange(p ** (T - n), dtype=np.int64)
    t = s * p**n
    Cs = t * An + Cn
    Ds = t * Bn + Dn
    cap = T + 64
    vC, _ = _vp_array(Cs, p, cap)
    vD, uD = _vp_array(Ds, p, cap)
    ok = (Ds != 0) & (vC - vD >= n)
    if not ok.any():
        return backend.zero()
    vQ = vp(Fraction(Q), p)
    vDtrue = vD[ok] - vQ
    ratio = ps.ratio
    L = ratio.L
    # unit of D' = uD / (Q unit); chi(p) = 1
    _, qu = split(Fraction(Q), p)
    units = uD[ok] % p**L
    qinv = pow(int(frac_mod(qu, p, L)), -1, p**L)
    units = (units * qinv) % p**L
    exps = ratio.unit_exps(units)
    base = ps.chi1.angle(det)
    N = ratio.order
    angles = [(base + Fraction(int(x), N)) % 1 for x in exps]
    lo = int(vDtrue.min())
    weights = np.array([p ** int(v - lo) for v in vDtrue], dtype=object)
    # weight p^v(D') / p^(T-n), times |det|^(1/2)
    val = angle_root_sum(angles, weights, backend)
    scale = Fraction(p) ** lo / p ** (T - n)
    vdet = vp(det, p)
    val = val * scale
    return _times_q_half(val, -vdet, p, backend)


def _times_q_half(val, h, p, backend):
    """val * q^(h/2)."""
    if h % 2 == 0:
        return val * Fraction(p) ** (h // 2)
    return val * backend.sqrt_p(p) * Fraction(p) ** ((h - 1) // 2)


def central_value(ps, z):
    return root(ps.central.angle(z), ps.backend)


# ---------------------------------------------------------------- Whittaker model of pi(1, mu)


def _require_minimal(ps):
    if ps.chi1.conductor:
        raise InvalidParameter("Whittaker branches are implemented for pi(1, mu)")


def _newform_gauss(ps):
    """int_{v(m) = -n} mu(-m) psi(-m) dm with the additive measure, vol(O) = 1."""
    if "gauss" not in ps._cache:
        p, n, mu = ps.p, ps.n, ps.chi2
        us = _unit_grid(p, n)
        angles = [(mu.angle(-int(u)) + psi_angle(Fraction(-int(u), p**n), p)) % 1 for u in us]
        ps._cache["gauss"] = angle_root_sum(angles, None, ps.backend)
    return ps._cache["gauss"]


def _unit_grid(p, R):
    u = np.arange(p**R, dtype=np.int64)
    return u[u % p != 0]


def whittaker(ps, i, alpha):
    """W^(i)(alpha) = W(diag(alpha, 1) n^-(p^i)) for the newform of pi(1, mu), up to one global constant."""
    _require_minimal(ps)
    p, n, mu, backend = ps.p, ps.n, ps.chi2, ps.backend
    if not 0 <= i <= n:
        raise InvalidParameter("need 0 <= i <= n")
    alpha = Fraction(alpha)
    if alpha == 0:
        raise InvalidParameter("alpha must be nonzero")
    v = vp(alpha, p)
    if i == n:
        if v < 0:
            return backend.zero()
        g = _newform_gauss(ps)
        return _times_q_half(g, -v - 2 * n, p, backend)
    if i == 0:
        if v < -n:
            return backend.zero()
        ang = mu.angle(alpha) + psi_angle(alpha, p)
        return _times_q_half(root(ang, backend), -v - 2 * n, p, backend)
    # mu(alpha p^-i (1 - p^(n-i) u)) psi(alpha p^-i (1 - p^(n-i) u)), u in O
    R = max(i, 2 * i - n - v, 1)
    u = np.arange(p**R, dtype=np.int64)
    L = mu.L
    w = (1 - (p ** (n - i)) * u) % p**L
    exps = mu.unit_exps(w)
    x = alpha / Fraction(p) ** i
    base = mu.angle(x)
    angles = []
    for e_, uu in zip(exps, u):
        y = x * (1 - Fraction(p) ** (n - i) * int(uu))
        angles.append((base + Fraction(int(e_), mu.order) + psi_angle(y, p)) % 1)
    val = angle_root_sum(angles, None, backend, den=p**R)
    return _times_q_half(val, -v - 2 * n + 2 * i, p, backend)


def _shell_integral(ps, i, alpha, m, s):
    """int_{O*} psi(m p^s u) W^(i)(alpha p^s u) du / vol(O*), exact."""
    p, backend = ps.p, ps.backend
    x = Fraction(p) ** s
    R = max(1, -vp(m * x, p) if m else 0, -vp(alpha * x, p) + 1, ps.n + 1)
    total = backend.zero()
    us = _unit_grid(p, R)
    for u in us:
        u = int(u)
        w = whittaker(ps, i, alpha * x * u)
        if backend.is_zero(w):
            continue
        total = total + w * root(psi_angle(m * x * u, p), backend)
    return total / len(us)


def ps_matrix_coefficient(ps, alpha, m, i, raw=False):
    """Phi^0([[alpha, m], [0, 1]] n^-(p^i)) from the Whittaker model.

    Shells v(x) >= 0 with d*x giving O* volume one; the tail of the i = n
    branch is geometric and summed in closed form after a stability check.
    """
    _require_minimal(ps)
    p, n, backend = ps.p, ps.n, ps.backend
    alpha, m = Fraction(alpha), Fraction(m)
    key = ("mc", alpha, m, i)
    if key in ps._cache:
        return ps._cache[key]
    S0 = max(0, -vp(m, p) if m else 0, -vp(alpha, p)) + n + 2
    total = backend.zero()
    wn = whittaker(ps, n, Fraction(1))
    wn_c = backend.conj(wn)
    for s in range(S0 + 1):
        term = _shell_integral(ps, i, alpha, m, s) * wn_c
        term = _times_q_half(term, -s, p, backend)
        if s < S0:
            total = total + term
            continue
        nxt = _times_q_half(_shell_integral(ps, i, alpha, m, s + 1) * wn_c, -(s + 1), p, backend)
        if not backend.equal(nxt * p, term):
            raise PrecisionError("shell tail is not geometric at the truncation depth")
        total = total + term * Fraction(p, p - 1)
    if raw:
        return total
    norm = _norm(ps)
    val = total / norm
    ps._cache[key] = val
    return val


def _norm(ps):
    if "norm" not in ps._cache:
        # Phi^0(1) = sum_{v(x) >= 0} |W^(n)(x)|^2 = |W^(n)(1)|^2 q/(q-1)
        w = whittaker(ps, ps.n, Fraction(1))
        val = ps.backend.abs2(w) if hasattr(ps.backend, "abs2") else w * ps.backend.conj(w)
        r = val * Fraction(ps.p, ps.p - 1)
        if not ps.backend.is_rational(r):
            raise PrecisionError("newform norm is not rational")
        ps._cache["norm"] = ps.backend.as_rational(r)
    return ps._cache["norm"]


def borel_lower(alpha, m, i, p):
    """[[alpha, m], [0, 1]] n^-(p^i) as a matrix."""
    return mat_mul(mat(alpha, m, 0, 1), mat(1, 0, Fraction(p) ** i, 1))
