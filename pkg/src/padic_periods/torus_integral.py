"""The local torus integral I(Phi, Omega) over F*\\E* as an exact finite sum.

The quotient F*\\E* is cut into cosets of 1 + p^k O_E (inert) or
1 + varpi_E^(2k) O_E (ramified); on each coset both Phi and Omega are
constant once k is past the invariance depth, so

    I = sum over cosets of weight * Phi(e) * Omega(e),   weights summing to 1.

For supercuspidal data the matrix coefficient comes as (key, angle) terms,
so angles are bucketed by key and each cyclotomic constant is multiplied once.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .characters import (
    MultChar,
    alpha_of,
    alpha_of_E,
    angle_root_sum,
    chars_up_to,
    norm_lift,
    residue_generator,
    root,
    trivial_on_Fstar,
)
from .padic_base import (
    INF,
    InvalidParameter,
    PrecisionError,
    in_k11,
    frac_mod,
    legendre,
    make_params,
    mat,
    mat_inv,
    mat_mul,
    primitive_root,
    torus_cosets,
    torus_matrix,
    vp,
)
from .principal_series import PsDatum, induced_phi
from .supercuspidal import ScDatum, closed_form_terms, constant, oracle_terms, sum_terms
from .values import EXACT, FLOAT, to_float


class VanishingIntegral(ArithmeticError):
    pass


@dataclass(frozen=True)
class TorusMeasure:
    ext_kind: str
    k: int
    cosets: tuple
    weight: Fraction

    @property
    def count(self):
        return len(self.cosets)


def torus_measure(torus, k):
    tc = torus_cosets(torus.p, torus.ext_kind, k)
    return TorusMeasure(torus.ext_kind, k, tc.points, tc.weight)


@dataclass(frozen=True)
class TestVectorSpec:
    """pi(diag(p^-d, 1)) applied to the newform (eta None) or the eta-twisted newform."""

    d: int
    eta: MultChar | None = None

    __test__ = False

    @property
    def kind(self):
        return "translate_newform" if self.eta is None else "twisted_newform"

    def label(self):
        if self.eta is None:
            return f"newform d={self.d}"
        return f"eta(s={self.eta.s}, c={self.eta.conductor}) d={self.d}"


@dataclass
class IntegralReport:
    params: dict
    coset_count: int
    depth: int
    value_exact: object
    value_float: tuple
    predicted: Fraction | None = None
    verdict: str = "n/a"
    seconds: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def value(self):
        return self.value_exact

    def is_zero(self, backend=EXACT):
        return backend.is_zero(self.value_exact)


# ---------------------------------------------------------------- evaluation of Phi and Omega


def _eta(rep, spec):
    if spec.eta is None:
        return MultChar.trivial(rep.p, 1)
    return spec.eta


def phi_value(rep, spec, a, b, torus):
    """Normalized matrix coefficient of the spec vector at the torus element a + b sqrt D."""
    if isinstance(rep, ScDatum):
        return sum_terms(rep, oracle_terms(rep, _eta(rep, spec), a, b, spec.d, torus))
    if isinstance(rep, PsDatum):
        val = induced_phi(rep, torus_matrix(a, b, spec.d, torus.D, torus.p))
        if spec.eta is not None:
            val = val * root(spec.eta.angle(a * a - b * b * torus.D), rep.backend)
        return val
    raise InvalidParameter(f"unsupported representation {rep!r}")


def _rep_conductor(rep):
    return rep.c_pi


def _central(rep):
    if isinstance(rep, PsDatum):
        return rep.central
    return None


def check_central(rep, omega):
    """Omega on F* must be the inverse of the central character of rep."""
    p = rep.p
    w = _central(rep)
    for x in (primitive_root(p), 1 + p, p):
        target = Fraction(0) if w is None else (-w.angle(x)) % 1
        if omega.angle(x, 0) != target:
            raise InvalidParameter("Omega restricted to F* must invert the central character")


# ---------------------------------------------------------------- invariance depth


def candidate_depth(rep, spec, omega, torus):
    """A depth on the E scale at which Phi * Omega is invariant (to be verified)."""
    c, d = _rep_conductor(rep), spec.d
    ce = spec.eta.conductor if spec.eta is not None else 0
    cO = omega.conductor
    if torus.e == 1:
        return max(d, c - d, cO, ce, 1)
    m = max(d, c - d - 1, (cO + 1) // 2, ce, 1)
    return 2 * m


def _generators(torus, m):
    """Topological generators of 1 + varpi_E^m O_E (m >= 1) or of O_E* (m = 0)."""
    p, D = torus.p, Fraction(torus.D)
    if m == 0:
        if torus.e == 1:
            g = residue_generator(p, torus.D)
            g = (Fraction(g[0]), Fraction(g[1]))
        else:
            g = (Fraction(primitive_root(p)), Fraction(0))
        return [g] + _generators(torus, 1)
    if torus.e == 1:
        pm = Fraction(p) ** m
        return [(1 + pm, Fraction(0)), (Fraction(1), pm)]
    # varpi_E^j = D^(j//2) * sqrt(D)^(j % 2)
    out = []
    for j in (m, m + 1):
        h = j // 2
        out.append((1 + D**h, Fraction(0)) if j % 2 == 0 else (Fraction(1), D**h))
    return out


def _emul(x, y, D):
    return (x[0] * y[0] + x[1] * y[1] * D, x[0] * y[1] + x[1] * y[0])


def _phi_omega(rep, spec, omega, torus, pt, backend):
    a, b = pt
    return phi_value(rep, spec, a, b, torus) * root(omega.angle(a, b), backend)


def _invariant_under(rep, spec, omega, torus, gens, reps, separate):
    backend = rep.backend
    D = Fraction(torus.D)
    for g in gens:
        if separate and omega.angle(*g) != 0:
            return False
    for pt in reps:
        for g in gens:
            moved = _emul(pt, g, D)
            if separate:
                x, y = phi_value(rep, spec, *pt, torus), phi_value(rep, spec, *moved, torus)
            else:
                x = _phi_omega(rep, spec, omega, torus, pt, backend)
                y = _phi_omega(rep, spec, omega, torus, moved, backend)
            if not backend.equal(x, y):
                return False
    return True


def invariance_depth(rep, spec, omega, torus):
    """Smallest m (E scale) with Phi, Omega invariant under 1 + varpi_E^m O_E, checked exhaustively.

    Supercuspidal data is checked for Phi and Omega separately; principal
    series data only for the product, since there Omega is not trivial on
    O_F* and K_0 acts on the newform through mu.
    """
    separate = isinstance(rep, ScDatum)
    ub = candidate_depth(rep, spec, omega, torus)
    fine = torus_cosets(torus.p, torus.ext_kind, ub // torus.e + 1).points
    if not _invariant_under(rep, spec, omega, torus, _generators(torus, ub), fine, separate):
        raise PrecisionError(f"no invariance at the candidate depth {ub}")
    reps = torus_cosets(torus.p, torus.ext_kind, max(1, ub // torus.e)).points
    for m in range(0, ub):
        if _invariant_under(rep, spec, omega, torus, _generators(torus, m), reps, separate):
            return m
    return ub


def coset_depth(m, torus):
    """Coset depth k (F scale) covering invariance depth m on the E scale."""
    return max(1, -(-m // torus.e))


# ---------------------------------------------------------------- the integral


def _closed_form_point(rep, pt, torus):
    a, b = pt
    if a != 0 and b != 0 and vp(b * torus.D * Fraction(rep.p) ** rep.k / a, rep.p) >= 0:
        return pt
    if b == 0:
        return pt
    # replace a = 0 by an equivalent representative p^(k + v(D))
    if a == 0:
        return (Fraction(rep.p) ** (rep.k + torus.vD), b)
    raise InvalidParameter("closed form cannot reach this coset representative")


def _sc_integral(rep, spec, omega, torus, measure, method):
    backend = rep.backend
    eta = _eta(rep, spec)
    buckets = {}
    for pt in measure.cosets:
        a, b = pt
        if method == "closed":
            if spec.d != rep.k:
                raise InvalidParameter("closed form is only available at d = k")
            q = _closed_form_point(rep, pt, torus)
            terms = closed_form_terms(rep, eta, q[0], q[1], torus)
        else:
            terms = oracle_terms(rep, eta, a, b, spec.d, torus)
        om = omega.angle(a, b)
        for key, ang in terms:
            buckets.setdefault(key, []).append((ang + om) % 1)
    total = backend.zero()
    for key in sorted(buckets, key=repr):
        s = angle_root_sum(buckets[key], None, backend)
        if backend.is_zero(s):
            continue
        total = total + constant(rep, key) * s
    return total * measure.weight


def _ps_integral(rep, spec, omega, torus, measure):
    backend = rep.backend
    total = backend.zero()
    for a, b in measure.cosets:
        val = phi_value(rep, spec, a, b, torus)
        if backend.is_zero(val):
            continue
        total = total + val * root(omega.angle(a, b), backend)
    return total * measure.weight


def local_integral(rep, spec, omega, torus, method="oracle", depth=None, predicted=None):
    """I(Phi, Omega) for the spec vector of rep against Omega on the torus E*."""
    t0 = time.perf_counter()
    check_central(rep, omega)
    m = candidate_depth(rep, spec, omega, torus) if depth is None else depth
    measure = torus_measure(torus, coset_depth(m, torus))
    if isinstance(rep, ScDatum):
        val = _sc_integral(rep, spec, omega, torus, measure, method)
    else:
        val = _ps_integral(rep, spec, omega, torus, measure)
    backend = rep.backend
    f = to_float(val) if backend is EXACT else to_float(complex(val))
    verdict = "n/a"
    if predicted is not None:
        if backend.equal(val, backend.rational(predicted)):
            verdict = "vanish" if predicted == 0 else "match"
        else:
            verdict = "mismatch"
    params = {
        "p": rep.p,
        "torus": torus.ext_kind,
        "c_pi": rep.c_pi,
        "d": spec.d,
        "eta": None if spec.eta is None else spec.eta.s,
        "omega": repr(omega),
    }
    return IntegralReport(params, measure.count, m, val, tuple(f), predicted, verdict, time.perf_counter() - t0)


# ---------------------------------------------------------------- vanishing sweep


def vanishing_sweep(rep, omega, torus, d_range, method="oracle"):
    """Newform translates for d in d_range.

    For d < k the surviving shells are i >= c and i = c - 1, and their volumes
    (recorded in extra["volume_identity"]) must be in ratio 1 : q - 1.
    """
    out = []
    k = rep.c_pi // 2
    for d in d_range:
        spec = TestVectorSpec(d)
        rpt = local_integral(rep, spec, omega, torus, method=method)
        if d < k:
            rpt.extra["volume_identity"] = volume_identity(rep.c_pi, d, torus)
        out.append(rpt)
    return out


def _shell_index(pt, d, torus):
    a, b = pt
    if b == 0:
        return INF
    if a == 0:
        return -INF
    return vp(b * torus.D * Fraction(torus.p) ** d / a, torus.p)


def volume_identity(c, d, torus):
    """(vol{i = c - 1}, vol{i >= c}) on cosets fine enough to resolve both sets."""
    k = max(1, c + abs(d) + 1)
    tc = torus_cosets(torus.p, torus.ext_kind, k)
    eq = sum(1 for pt in tc.points if _shell_index(pt, d, torus) == c - 1)
    ge = sum(1 for pt in tc.points if _shell_index(pt, d, torus) >= c)
    return eq * tc.weight, ge * tc.weight


# ---------------------------------------------------------------- epsilon dichotomy


def epsilon_dichotomy(rep, omega, torus):
    """Predicted sign of eps(Pi x Omega, 1/2) from the level case table."""
    if not isinstance(rep, ScDatum):
        raise InvalidParameter("the case table covers supercuspidal data")
    c = rep.c_pi
    k = c // 2
    cO = omega.conductor
    if torus.e == 1:
        if c % 2:
            if cO > k:
                raise InvalidParameter("needs c(Omega) <= k")
            return -1
        if cO >= k:
            raise InvalidParameter("needs c(Omega) < k")
        return 1
    if c % 2 == 0:
        if cO > c - 1:
            raise InvalidParameter("needs c_E(Omega) <= 2k - 1")
        return -1
    if rep.params.e != 2:
        raise InvalidParameter("odd level needs theta on a ramified extension")
    if cO >= rep.n_theta:
        raise InvalidParameter("needs c_E(Omega) < c(theta)")
    return legendre(-rep.params.xi, rep.p)


def pool(rep, d_values=None, eta_level=None):
    """Pool of candidate test vectors: newform translates and twisted newforms."""
    c = rep.c_pi
    k = c // 2
    if d_values is None:
        d_values = range(0, c + 1)
    if eta_level is None:
        eta_level = k
    L = rep.L if isinstance(rep, ScDatum) else max(rep.chi1.L, rep.chi2.L)
    specs = []
    for d in d_values:
        specs.append(TestVectorSpec(d))
        for eta in chars_up_to(rep.p, eta_level, L):
            if eta.conductor:
                specs.append(TestVectorSpec(d, eta))
    return specs


def pool_sweep(rep, omega, torus, specs, method="oracle"):
    return [(spec, local_integral(rep, spec, omega, torus, method=method)) for spec in specs]


# ---------------------------------------------------------------- twisting


def twist_omega(omega, chi, torus):
    """Omega * chi_E^-1 with chi_E = chi o Norm."""
    return omega * norm_lift(chi, torus).inverse()


def twisted_sc_integral(rep, spec, omega, torus, chi):
    """sum weight * Phi(e) chi(N e) * (Omega chi_E^-1)(e), evaluated pointwise."""
    backend = rep.backend
    om2 = twist_omega(omega, chi, torus)
    m = max(candidate_depth(rep, spec, omega, torus), 2 * chi.conductor if torus.e == 2 else chi.conductor)
    measure = torus_measure(torus, coset_depth(m, torus))
    total = backend.zero()
    for a, b in measure.cosets:
        nrm = a * a - b * b * torus.D
        val = phi_value(rep, spec, a, b, torus) * root(chi.angle(nrm), backend)
        total = total + val * root(om2.angle(a, b), backend)
    return total * measure.weight


def twist_reduce(rep, chi, omega, torus):
    """(minimal representation, Omega chi_E^-1) for pi(chi, mu chi) = pi(1, mu) x chi."""
    if isinstance(rep, PsDatum):
        from .principal_series import build_ps

        mu = rep.ratio
        if rep.chi1.conductor == 0 and chi is None:
            return rep, omega
        base = build_ps(mu, backend=rep.backend)
        return base, omega * norm_lift(rep.chi1, torus)
    if chi is None or chi.conductor == 0:
        return rep, omega
    raise InvalidParameter("supercuspidal data is already minimal in this model")


# ---------------------------------------------------------------- averaged test vector


@dataclass
class Certificate:
    group: tuple
    normality: bool
    pairing: object
    samples: int


def k11_group(rep, torus):
    """(lower, upper) exponents of the K_1^1 group fixing the averaged vector."""
    c, k = rep.c_pi, rep.c_pi // 2
    if isinstance(rep, PsDatum):
        if torus.e == 1:
            return (k, k) if c % 2 == 0 else (k + 1, k + 1)
        kk = (c + 1) // 2
        return (kk + 1, kk) if c % 2 == 0 else (kk, kk - 1)
    if torus.e == 1:
        return (k, k)
    return (k + 1, k)


def averaged_test_vector(rep, spec, omega, torus, value=None, samples=None):
    """Certify that averaging the test vector against Omega gives a nonzero fixed eigenvector."""
    backend = rep.backend
    if value is None:
        value = local_integral(rep, spec, omega, torus).value_exact
    if backend.is_zero(value):
        raise VanishingIntegral("the local integral vanishes; no certificate")
    lower, upper = k11_group(rep, torus)
    p, D = torus.p, Fraction(torus.D)
    pts = samples or torus_cosets(p, torus.ext_kind, 2).points
    gens = []
    for x in range(p):
        gens.append(mat(1 + Fraction(p) ** upper * x, Fraction(p) ** upper, 0, 1))
        gens.append(mat(1, 0, Fraction(p) ** lower * (x + 1), 1))
        gens.append(mat(1, 0, 0, 1 + Fraction(p) ** upper * (x + 1)))
    ok = True
    for a, b in pts:
        t = torus_matrix(a, b, 0, D, p)
        ti = mat_inv(t)
        for g in gens:
            conj = mat_mul(mat_mul(ti, g), t)
            if not in_k11(conj, lower, upper, p):
                ok = False
    # <avg_Omega pi(t) v, v> = integral of Phi(t) Omega(t) = I
    return Certificate((lower, upper), ok, value, len(pts))


# ---------------------------------------------------------------- the regime with ((-1)/q) = -1


def regime_admissible(rep, eta, torus):
    """True for level-k eta with (alpha_eta^2 - alpha^2 D) a non-residue."""
    if eta.conductor != rep.k:
        return False
    t1, t2 = alpha_of_E(rep.theta)
    gap = Fraction(alpha_of(eta).alpha) ** 2 - (t1 * t1 + t2 * t2 * torus.D)
    return legendre(int(frac_mod(gap, rep.p, 1)), rep.p) == -1


def explicit_regime_value(rep, eta, omega, torus):
    """Closed evaluation for inert E, c(pi) = 2k, ((-1)/q) = -1, k >= 2 c(Omega) and c(eta) = k.

    Returns (value, roots): roots are the residues a mod p^max(1, c(Omega) - k + c(eta))
    with a^2 = alpha_eta^2 D / (alpha_eta^2 - alpha^2 D), alpha_theta = alpha sqrt D, and the value is
    (2 + C_1 eta(-1) sum_a Omega(a + sqrt D)) / ((q^2 - 1) q^(k - 2)).
    """
    p, k, D = rep.p, rep.k, Fraction(torus.D)
    backend = rep.backend
    if torus.e != 1 or rep.c_pi % 2 or k < 2 * omega.conductor or eta.conductor != k:
        raise InvalidParameter("outside the explicit regime")
    a_eta = Fraction(alpha_of(eta).alpha)
    t1, t2 = alpha_of_E(rep.theta)
    # alpha_theta = alpha sqrt D, and the norm computation needs alpha^2 D = alpha_theta^2
    if t1 * t2 != 0:
        raise InvalidParameter("alpha_theta is not a multiple of sqrt D")
    sq = t1 * t1 + t2 * t2 * D
    gap = a_eta**2 - sq
    if legendre(int(frac_mod(gap, p, 1)), p) != -1:
        raise InvalidParameter("eta is not admissible: need (alpha_eta^2 - alpha^2 D) a non-residue")
    target = a_eta**2 * D / gap
    m = omega.conductor - k + eta.conductor
    roots = solve_square(target, p, m)
    if any(a % p == 0 for a in roots) or len(roots) != 2:
        raise AssertionError("unexpected solution count for the quadratic congruence")
    C1 = rep.C(MultChar.trivial(p, rep.L))
    total = backend.zero()
    for a in roots:
        total = total + root(omega.angle(a, 1), backend)
    val = (backend.rational(2) + C1 * root(eta.angle(-1), backend) * total) / ((p * p - 1) * Fraction(p) ** (k - 2))
    return val, roots


def solve_square(target, p, m):
    """All a mod p^max(m, 1) with a^2 = target (target a p-adic unit), by exhaustive search."""
    M = p ** max(m, 1)
    t = frac_mod(target, p, max(m, 1))
    return [a for a in range(M) if (a * a - t) % M == 0]


# ---------------------------------------------------------------- decay experiment


def spherical_phi(p, alpha_sat, v):
    """Macdonald's formula for the bi-K-invariant matrix coefficient at diag(p^v, 1)."""
    v = abs(v)
    a, ai = alpha_sat, 1 / alpha_sat
    q = float(p)
    num = (a - ai / q) * a**v - (ai - a / q) * ai**v
    den = (1 + 1 / q) * (a - ai)
    return (num / den * q ** (-v / 2)) if abs(a - ai) > 1e-12 else _spherical_limit(p, v)


def _spherical_limit(p, v):
    q = float(p)
    return (1 + v * (1 - 1 / q) / (1 + 1 / q)) * q ** (-v / 2)


def _cartan_exponent(g, p):
    """|v| with g in K diag(p^v, 1) K Z."""
    (A, B), (C, D) = g
    mn = min(vp(x, p) for x in (A, B, C, D) if x != 0)
    vdet = vp(A * D - B * C, p)
    return vdet - 2 * mn


def spherical_phi_oracle(p, alpha_sat, v, depth=None):
    """Cross-check of Macdonald's formula by a shell sum of unramified Whittaker values."""
    q = float(p)
    a, ai = alpha_sat, 1 / alpha_sat

    def W(n):
        if n < 0:
            return 0.0
        return q ** (-n / 2) * (a ** (n + 1) - ai ** (n + 1)) / (a - ai)

    depth = depth or 60 + abs(v)
    s = sum(W(n + abs(v)) * np.conj(W(n)) for n in range(depth))
    norm = sum(abs(W(n)) ** 2 for n in range(depth))
    return complex(s / norm).real


def _decay_value(p, omega, torus, n, k, alpha_sat):
    from .principal_series import _vp_array

    cap = 10 * k + 10
    cO = max(omega.conductor, 1)
    b = p * np.arange(p ** (k - 1), dtype=np.int64)
    a = np.arange(p**k, dtype=np.int64)
    vb, _ = _vp_array(b, p, cap)
    va, _ = _vp_array(a, p, cap)
    # (1, b): min valuation of entries min(0, v(b) - n), det a unit
    ex1 = -2 * np.minimum(0, vb - n)
    # (a, 1): entries a, p^n, D p^-n, a
    ex2 = -2 * np.minimum(va, -n)
    phi = {int(v): spherical_phi(p, alpha_sat, int(v)) for v in np.unique(np.concatenate([ex1, ex2]))}
    cache = {}

    def om(kind, r):
        key = (kind, r)
        if key not in cache:
            ang = omega.angle(1, r) if kind == 1 else omega.angle(r, 1)
            cache[key] = complex(root(ang, FLOAT))
        return cache[key]

    M = p**cO
    tot1 = [phi[int(e)] * om(1, int(x) % M) for e, x in zip(ex1, b)]
    tot2 = [phi[int(e)] * om(2, int(x) % M) for e, x in zip(ex2, a)]
    vals = tot1 + tot2
    re = math.fsum(z.real for z in vals)
    im = math.fsum(z.imag for z in vals)
    return complex(re, im) / len(vals)


def decay_experiment(p, omega, n_max, alpha_sat=None, torus=None):
    """|I(Phi_d, Omega)| for d = -n, n = 0..n_max, for the spherical vector of an unramified principal series.

    Returns (rows, slope, drift): rows are (n, |I|), slope is the least-squares
    slope of log_q |I| against n over the nonzero rows, drift the largest change when the coset
    depth is refined by one step.
    """
    torus = torus or make_params(p, "inert")
    if torus.e != 1:
        raise InvalidParameter("the decay experiment uses an inert torus")
    if not trivial_on_Fstar(omega):
        raise InvalidParameter("Omega must be trivial on F*")
    alpha_sat = alpha_sat if alpha_sat is not None else complex(np.exp(0.7j))
    rows, drift = [], 0.0
    for n in range(n_max + 1):
        k = max(n, omega.conductor, 1)
        v1 = _decay_value(p, omega, torus, n, k, alpha_sat)
        v2 = _decay_value(p, omega, torus, n, k + 1, alpha_sat)
        drift = max(drift, abs(v1 - v2))
        rows.append((n, abs(v1)))
    # exact zeros (e.g. n = 0 for ramified Omega) carry no decay information
    fit = [r for r in rows if r[1] > 1e-12]
    if len(fit) < 2:
        raise VanishingIntegral("too few nonzero values to fit a slope")
    ns = np.array([r[0] for r in fit], dtype=float)
    ys = np.array([math.log(r[1], p) for r in fit])
    slope = float(np.polyfit(ns, ys, 1)[0])
    return rows, slope, drift
