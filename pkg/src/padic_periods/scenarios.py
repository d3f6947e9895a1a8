"""Named, reproducible checks: representation builders plus a scenario registry.

Each scenario returns an Outcome; the command line and the acceptance suite
both run them, so a scenario is the single definition of what "pass" means.
"""

from __future__ import annotations

import fnmatch
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .characters import (
    EChar,
    MultChar,
    brute_conductor,
    chars_up_to,
    e_chars,
    enumerate_chars,
    gauss_sum,
    is_regular,
    norm_lift,
    stationary_phase_shift,
)
from .padic_base import InvalidParameter, make_params, torus_cosets
from .principal_series import build_ps
from .supercuspidal import build_sc, c_quotient, mc_closed_form, mc_oracle
from .torus_integral import (
    TestVectorSpec,
    decay_experiment,
    explicit_regime_value,
    local_integral,
    pool,
    regime_admissible,
    twist_omega,
    twisted_sc_integral,
    vanishing_sweep,
)
from .values import EXACT, FLOAT

# ---------------------------------------------------------------- builders


@lru_cache(maxsize=None)
def regular_thetas(p, ext_kind, level, xi=None, precision=6):
    """Regular characters of E'* trivial on F*, of exact conductor `level`."""
    E = make_params(p, ext_kind, precision, xi=xi)
    return tuple(t for t in e_chars(E, level) if t.conductor == level and is_regular(t))


def theta_params(p, c_pi, xi=None, precision=6):
    """(E', theta level) carrying a minimal supercuspidal of conductor c_pi."""
    if c_pi < 2:
        raise InvalidParameter("supercuspidal conductor must be >= 2")
    if c_pi % 2 == 0:
        return make_params(p, "inert", precision), c_pi // 2
    return make_params(p, "ramified", precision, xi=xi), c_pi - 1


def sc_for(p, c_pi, theta_index=0, xi=None, precision=6, backend=EXACT):
    E, level = theta_params(p, c_pi, xi, precision)
    if E.e == 1 and level >= 2 and theta_index == 0:
        # a regular character with beta = sqrt(D) / p^level, found without enumeration
        theta = EChar(E, 0, (0, Fraction(1, p**level)))
    else:
        thetas = regular_thetas(p, E.ext_kind, level, E.xi if E.e == 2 else None, precision)
        if not 0 <= theta_index < len(thetas):
            raise InvalidParameter(f"theta index {theta_index} out of range 0..{len(thetas) - 1}")
        theta = thetas[theta_index]
    return build_sc(E, theta, backend)


def square_mus(p, level):
    """Characters mu of exact conductor `level` that are squares (mu = nu^2 for some nu)."""
    return [c for c in enumerate_chars(p, level) if c.conductor == level and c.s % 2 == 0]


def ps_for(p, level, index=0, backend=EXACT):
    mus = square_mus(p, level)
    if not 0 <= index < len(mus):
        raise InvalidParameter(f"mu index {index} out of range 0..{len(mus) - 1}")
    return build_ps(mus[index], backend=backend)


def central_lift(mu, torus):
    """A character of E* with restriction mu^-1 to F*: (mu')^-1 o Norm with mu'^2 = mu."""
    half = MultChar(mu.p, mu.L, (-(mu.s // 2)) % mu.order)
    return norm_lift(half, torus)


def eta_for(p, level, index, L):
    etas = [e for e in chars_up_to(p, level, L) if e.conductor == level]
    if not 0 <= index < len(etas):
        raise InvalidParameter(f"eta index {index} out of range 0..{len(etas) - 1}")
    return etas[index]


def omegas(torus, level):
    """Characters of E* trivial on F* of exact conductor `level` (E scale)."""
    return [o for o in e_chars(torus, level) if o.conductor == level]


def omega_for(torus, level, index, rep=None):
    pool_ = omegas(torus, level)
    if not 0 <= index < len(pool_):
        raise InvalidParameter(f"Omega index {index} out of range 0..{len(pool_) - 1}")
    om = pool_[index]
    if rep is not None and hasattr(rep, "chi2"):
        om = central_lift(rep.chi2, torus) * om
    return om


# ---------------------------------------------------------------- outcomes


@dataclass
class Outcome:
    value: object
    expected: str
    passed: bool
    params: dict
    details: dict = field(default_factory=dict)


def _count(value):
    return EXACT.rational(value)


def _fr(x):
    return str(Fraction(x))


# ---------------------------------------------------------------- scenarios


def gauss_law(primes=(5, 7), levels=(1, 2, 3), shells=(1, 2, 3)):
    bad, n = [], 0
    for p in primes:
        for k in levels:
            for chi in enumerate_chars(p, k):
                if chi.conductor != k:
                    continue
                if brute_conductor(chi) != k:
                    bad.append(("conductor", p, chi.s))
                for j in shells:
                    g = gauss_sum(chi, Fraction(1, p**j))
                    n += 1
                    if j != k:
                        ok = g.is_zero()
                    else:
                        ok = (g * g.conj()).eq_rational(Fraction(p, (p - 1) ** 2 * p ** (k - 1)))
                    if not ok:
                        bad.append((p, k, chi.s, j))
    return Outcome(_count(len(bad)), "0", not bad, {"p": list(primes), "levels": list(levels)}, {"checked": n, "bad": bad})


def stationary_phase(p=5, levels=(2, 3)):
    bad, n = [], 0
    for c in levels:
        for chi in enumerate_chars(p, c):
            if chi.conductor != c:
                continue
            for nu in enumerate_chars(p, 1):
                if nu.conductor != 1:
                    continue
                n += 1
                try:
                    stationary_phase_shift(chi, nu.at_level(c))
                except AssertionError:
                    bad.append((c, chi.s, nu.s))
    return Outcome(_count(len(bad)), "0", not bad, {"p": p, "levels": list(levels)}, {"checked": n})


def epsilon_quotient(p=5, theta_levels=(1, 2, 3)):
    """Quotient formula on the full in-range grid and unitarity C_nu C_nu^-1 = 1."""
    bad, n = [], 0
    reps = []
    for lev in theta_levels:
        E = make_params(p, "inert")
        reps.append(build_sc(E, regular_thetas(p, "inert", lev)[0]))
        if lev >= 2 and lev % 2 == 0:
            Ep = make_params(p, "ramified")
            reps.append(build_sc(Ep, regular_thetas(p, "ramified", lev, 1)[0]))
    for sc in reps:
        e, nt = sc.e, sc.n_theta
        etas = [x for x in chars_up_to(p, sc.k, sc.L) if not x.conductor or e * x.conductor - e + 1 <= nt]
        nus = [x for x in chars_up_to(p, sc.k, sc.L) if not x.conductor or 2 * (e * x.conductor - e + 1) <= nt]
        for nu in etas:
            n += 1
            if not (sc.C(nu) * sc.C(nu.inverse())).eq_rational(1):
                bad.append(("unitarity", sc.c_pi, nu.s))
        for eta in etas:
            for nu in nus:
                n += 1
                try:
                    c_quotient(sc, nu, eta)
                except AssertionError:
                    bad.append(("quotient", sc.c_pi, nu.s, eta.s))
    return Outcome(_count(len(bad)), "0", not bad, {"p": p, "theta_levels": list(theta_levels)}, {"checked": n})


def closed_form_vs_oracle(p=5, c_pi=4, eta_level=2):
    sc = sc_for(p, c_pi)
    torus = sc.params
    pts = [pt for pt in torus_cosets(p, torus.ext_kind, sc.k).points]
    pts = [(Fraction(p) ** sc.k, b) if a == 0 else (a, b) for a, b in pts]
    bad, n = 0, 0
    for eta in chars_up_to(p, eta_level, sc.L):
        for a, b in pts:
            n += 1
            if not EXACT.equal(mc_closed_form(sc, eta, a, b), mc_oracle(sc, eta, a, b, sc.k)):
                bad += 1
    return Outcome(_count(bad), "0", bad == 0 and n >= 100, {"p": p, "c_pi": c_pi}, {"points": n})


def _sc_grid(primes, conductors):
    for p in primes:
        for c in conductors:
            yield p, c, sc_for(p, c)


def vanishing(primes=(5, 7), conductors=(2, 3, 4), tori=("inert", "ramified")):
    """Newform translates d != k give exactly zero whenever (2/e) c(Omega) < c(pi)."""
    bad, n, vol_bad = [], 0, []
    for p, c, sc in _sc_grid(primes, conductors):
        k = c // 2
        for kind in tori:
            T = make_params(p, kind)
            lim = (c - 1) // 2 if kind == "inert" else c - 1
            oms = [o for o in e_chars(T, lim)]
            top = max(o.conductor for o in oms)
            chosen = [oms[0]] + [o for o in oms if o.conductor == top and o.conductor > 0][:2]
            for om in chosen:
                for r in vanishing_sweep(sc, om, T, [d for d in range(0, c + 1) if d != k]):
                    n += 1
                    if not r.value_exact.is_zero():
                        bad.append((p, c, kind, r.params["d"]))
                    if "volume_identity" in r.extra:
                        eq, ge = r.extra["volume_identity"]
                        if eq != (p - 1) * ge:
                            vol_bad.append((p, c, kind, r.params["d"]))
    ok = not bad and not vol_bad
    return Outcome(_count(len(bad) + len(vol_bad)), "0", ok, {"p": list(primes), "c_pi": list(conductors)}, {"integrals": n})


def _first_nonzero(sc, omega, torus, etas, d):
    for eta in etas:
        r = local_integral(sc, TestVectorSpec(d, eta), omega, torus, method="closed")
        if not r.value_exact.is_zero():
            return eta, r
    return None, None


def inert_value(p=5, c_pi=4):
    """Level-1 eta with eta(-1) C_1 Omega(sqrt D) = 1 gives 4 / ((q^2 - 1) q^(k - 2))."""
    sc = sc_for(p, c_pi)
    T = sc.params
    k = sc.k
    om = e_chars(T, 0)[0]
    target = Fraction(4, (p * p - 1)) / Fraction(p) ** (k - 2)
    C1 = sc.C(MultChar.trivial(p, sc.L))
    om_sqrtD = om.value(0, 1)
    found = None
    for eta in chars_up_to(p, 1, sc.L):
        sign = eta.value(-1) * C1 * om_sqrtD
        if not sign.eq_rational(1):
            continue
        r = local_integral(sc, TestVectorSpec(k, eta), om, T, method="closed")
        found = (eta, r)
        break
    if found is None:
        return Outcome(EXACT.zero(), _fr(target), False, {"p": p, "c_pi": c_pi}, {"reason": "no eta with the sign condition"})
    eta, r = found
    return Outcome(r.value_exact, _fr(target), r.value_exact.eq_rational(target), {"p": p, "c_pi": c_pi, "eta": eta.s, "d": k})


def explicit_regime(p=7, c_pi=4):
    """((-1)/q) = -1, k >= 2 c(Omega): zero for c(eta) < k; the closed formula for every admissible
    level-k eta; the constructed eta (first within a factor 2 of the maximum) has |I| q^k in [1/2, 8]."""
    sc = sc_for(p, c_pi)
    T = sc.params
    k = sc.k
    peak = 4 * p * p / (p * p - 1)
    bad, n, chosen, vanishing_admissible, root_counts = [], 0, {}, 0, {}
    for om in [e_chars(T, 0)[0]] + omegas(T, 1)[:2]:
        if k < 2 * om.conductor:
            continue
        pick = None
        for eta in chars_up_to(p, k, sc.L):
            if eta.conductor < k:
                r = local_integral(sc, TestVectorSpec(k, eta), om, T, method="closed")
                n += 1
                if not r.value_exact.is_zero():
                    bad.append(("nonzero", om.conductor, eta.s))
                continue
            if not regime_admissible(sc, eta, T):
                continue
            r = local_integral(sc, TestVectorSpec(k, eta), om, T, method="closed")
            want, roots = explicit_regime_value(sc, eta, om, T)
            root_counts[len(roots)] = root_counts.get(len(roots), 0) + 1
            n += 1
            if not EXACT.equal(r.value_exact, want):
                bad.append(("formula", om.conductor, eta.s))
            size = abs(complex(r.value_exact)) * p**k
            vanishing_admissible += size == 0
            if pick is None and size >= peak / 2:
                pick = (eta.s, size)
        chosen[om.conductor] = pick
        if pick is None or not 0.5 <= pick[1] <= 8:
            bad.append(("size", om.conductor, pick))
    details = {
        "checked": n,
        "constructed": chosen,
        "vanishing_admissible": vanishing_admissible,
        "solution_counts": root_counts,
    }
    return Outcome(_count(len(bad)), "0", not bad, {"p": p, "c_pi": c_pi}, details)


def ramified_value(p=5, xi=1, torus_xi=1):
    """Odd conductor c_pi = 2k+1 on a ramified torus: 2/((q-1) q^(k-1)) if ((-xi)/q) = 1, else all zero."""
    from .padic_base import legendre

    sc = sc_for(p, 3, xi=xi)
    T = make_params(p, "ramified", xi=torus_xi)
    k = sc.k
    sign = legendre(-xi, p)
    target = Fraction(2, (p - 1)) / Fraction(p) ** (k - 1)
    om = e_chars(T, 0)[0]
    if sign == 1:
        C1 = sc.C(MultChar.trivial(p, sc.L))
        for eta in chars_up_to(p, 1, sc.L):
            if (eta.value(-1) * C1 * om.value(0, 1)).eq_rational(1):
                r = local_integral(sc, TestVectorSpec(k, eta), om, T, method="closed")
                ok = r.value_exact.eq_rational(target)
                return Outcome(r.value_exact, _fr(target), ok, {"p": p, "xi": xi, "eta": eta.s})
        return Outcome(EXACT.zero(), _fr(target), False, {"p": p, "xi": xi})
    nz = 0
    n = 0
    for o in e_chars(T, 1):
        for spec in pool(sc, d_values=range(0, sc.c_pi + 1), eta_level=1):
            n += 1
            if not local_integral(sc, spec, o, T).value_exact.is_zero():
                nz += 1
    return Outcome(_count(nz), "0", nz == 0, {"p": p, "xi": xi}, {"pool": n})


PS_CASES = {
    # (torus, mu level, d, Omega0 level): expected value
    "inert-even": ("inert", 2, 1, 1, lambda q: Fraction(1, q + 1)),
    "inert-odd": ("inert", 3, 1, 2, lambda q: Fraction(1, (q + 1) * q)),
    "ramified-even": ("ramified", 2, 0, 2, lambda q: Fraction(1, 2 * q)),
    "ramified-odd": ("ramified", 3, 1, 2, lambda q: Fraction(1, 2 * q)),
}


def ps_value(case, p=5, samples=3):
    kind, level, d, olev, f = PS_CASES[case]
    T = make_params(p, kind)
    ps = ps_for(p, level)
    target = f(p)
    vals = []
    for o0 in e_chars(T, olev)[:samples]:
        om = central_lift(ps.chi2, T) * o0
        vals.append(local_integral(ps, TestVectorSpec(d), om, T).value_exact)
    ok = all(v.eq_rational(target) for v in vals)
    return Outcome(vals[0], _fr(target), ok, {"p": p, "torus": kind, "mu_level": level, "d": d})


def twist_identity(p=5):
    """I(Phi, Omega) = I(Phi chi(det), Omega chi_E^-1) for level-1 chi, in each family."""
    bad, n = [], 0
    chis = [c for c in enumerate_chars(p, 1) if c.conductor == 1]
    # principal series: the twist is realized by its own induced model
    for kind, level, d in (("inert", 2, 1), ("ramified", 2, 0)):
        T = make_params(p, kind)
        ps = ps_for(p, level)
        om = central_lift(ps.chi2, T) * e_chars(T, 1)[-1]
        base = local_integral(ps, TestVectorSpec(d), om, T).value_exact
        for chi in chis:
            n += 1
            other = local_integral(build_ps(ps.chi2, chi), TestVectorSpec(d), twist_omega(om, chi, T), T).value_exact
            if not EXACT.equal(base, other):
                bad.append(("ps", kind, chi.s))
    # supercuspidal: Phi chi(det) evaluated pointwise
    for c, kind in ((4, "inert"), (3, "ramified")):
        sc = sc_for(p, c)
        T = make_params(p, kind)
        om = e_chars(T, 1)[-1]
        for d in (sc.k,):
            spec = TestVectorSpec(d)
            base = local_integral(sc, spec, om, T).value_exact
            for chi in chis:
                n += 1
                if not EXACT.equal(base, twisted_sc_integral(sc, spec, om, T, chi)):
                    bad.append(("sc", c, chi.s))
    return Outcome(_count(len(bad)), "0", not bad, {"p": p}, {"checked": n})


def decay(p=5, n_max=6, omega_level=0):
    T = make_params(p, "inert")
    om = e_chars(T, omega_level)[-1]
    rows, slope, drift = decay_experiment(p, om, n_max)
    ok = slope <= -Fraction(3, 8) + 0.05 and drift < 1e-9
    return Outcome(FLOAT.rational(slope), "slope <= -0.325", ok, {"p": p, "n_max": n_max}, {"rows": rows, "drift": drift})


def dichotomy_sweep(p=5):
    """Inert torus: odd c_pi gives only zeros over the pool, even c_pi gives a nonzero value."""
    T = make_params(p, "inert")
    zero_bad, n = 0, 0
    sc3 = sc_for(p, 3)
    for om in e_chars(T, 1):
        for spec in pool(sc3, d_values=range(0, 4), eta_level=1):
            n += 1
            if not local_integral(sc3, spec, om, T).value_exact.is_zero():
                zero_bad += 1
    found = {}
    for c in (2, 4):
        sc = sc_for(p, c)
        hit = False
        for om in e_chars(T, (c // 2) - 1):
            for spec in pool(sc, d_values=[sc.k], eta_level=max(1, sc.k - 1)):
                if not local_integral(sc, spec, om, T).value_exact.is_zero():
                    hit = True
                    break
            if hit:
                break
        found[c] = hit
    ok = zero_bad == 0 and all(found.values())
    return Outcome(_count(zero_bad), "0", ok, {"p": p}, {"odd_pool": n, "even_nonzero": found})


@dataclass(frozen=True)
class Scenario:
    id: str
    run: object
    anchor: str
    kwargs: dict = field(default_factory=dict)


REGISTRY = [
    Scenario("gauss-law", gauss_law, "int chi psi on the shell -j vanishes unless j = c(chi); |G|^2 = q/((q-1)^2 q^(c-1))"),
    Scenario("stationary-phase", stationary_phase, "int chi nu psi = nu(-alpha_chi / p^c) int chi psi for c(chi) >= 2 c(nu)"),
    Scenario("epsilon-quotient", epsilon_quotient, "C_{nu eta^-1} / C_{eta^-1} = nu_E((alpha_theta + alpha_eta ...)/varpi^c); C_nu C_{nu^-1} = 1"),
    Scenario("mc-closed-form", closed_form_vs_oracle, "closed-form matrix coefficient at d = k equals the step-by-step Kirillov evaluation"),
    Scenario("vanishing", vanishing, "I(Phi, Omega) = 0 for newform translates with d != k when (2/e) c(Omega) < c(pi)"),
    Scenario("inert-value", inert_value, "inert E, c(pi) = 2k: I = 4/((q^2-1) q^(k-2))"),
    Scenario("inert-value-p13", inert_value, "inert E, c(pi) = 2k: I = 4/((q^2-1) q^(k-2))", {"p": 13}),
    Scenario("explicit-regime", explicit_regime, "((-1)/q) = -1, k >= 2c(Omega): I = (2 + C_1 eta(-1)[Omega(a+sqrtD) + Omega(-a+sqrtD)]) / ((q^2-1) q^(k-2))"),
    Scenario("ramified-value", ramified_value, "ramified E, c(pi) = 2k+1, ((-xi)/q) = 1: I = 2/((q-1) q^(k-1))"),
    Scenario("ramified-vanishing", ramified_value, "ramified E, c(pi) = 2k+1, ((-xi)/q) = -1: every candidate vector gives 0", {"xi": 2}),
    Scenario("ps-inert-even", ps_value, "pi(1, mu), c(mu) = 2k, inert E: I = 1/((q+1) q^(k-1))", {"case": "inert-even"}),
    Scenario("ps-inert-odd", ps_value, "pi(1, mu), c(mu) = 2k+1, inert E: I = 1/((q+1) q^k)", {"case": "inert-odd"}),
    Scenario("ps-ramified-even", ps_value, "pi(1, mu), ramified E: I = 1/(2 q^(c(pi)-k))", {"case": "ramified-even"}),
    Scenario("ps-ramified-odd", ps_value, "pi(1, mu), ramified E: I = 1/(2 q^(c(pi)-k))", {"case": "ramified-odd"}),
    Scenario("twist-identity", twist_identity, "I(Phi, Omega) = I(Phi chi(det), Omega chi_E^-1)"),
    Scenario("decay", decay, "spherical translates d = -n: log_q |I| decays with slope <= -3/8"),
    Scenario("dichotomy-sweep", dichotomy_sweep, "inert E: odd c(pi) gives I = 0 for every candidate, even c(pi) gives some I != 0"),
]


def find(pattern):
    return [s for s in REGISTRY if fnmatch.fnmatch(s.id, pattern or "*")]


def get(sid):
    for s in REGISTRY:
        if s.id == sid:
            return s
    raise KeyError(sid)
