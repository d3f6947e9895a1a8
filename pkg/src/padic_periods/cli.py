"""Command line front end: single computations plus the scenario runner.

Every subcommand emits a list of report records with the fields
scenario, params, value_exact, value_float {re, im}, expected, verdict, anchor, seconds.
Exit codes: 0 all pass, 1 some verdict failed, 2 invalid parameters, 3 range error.
"""

from __future__ import annotations

import argparse
import csv
import inspect
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import scenarios as S
from .characters import EpsilonOutOfRange, MultChar, brute_conductor, gauss_sum
from .padic_base import InvalidParameter, InvalidPrime, PrecisionError, make_params
from .principal_series import borel_lower, induced_phi, ps_matrix_coefficient
from .supercuspidal import epsilon_factor, mc_closed_form, mc_oracle
from .torus_integral import (
    TestVectorSpec,
    decay_experiment,
    epsilon_dichotomy,
    local_integral,
    pool,
)
from .values import CyclotomicOverflow, CycValue, get_backend

OUT_ENV = "PADIC_PERIODS_OUT"
FIELDS = ["scenario", "params", "value_exact", "value_float", "expected", "verdict", "anchor", "seconds"]

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_RANGE = 0, 1, 2, 3


class _Clock:
    def __init__(self, frozen):
        self.frozen = frozen

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = 0.0 if self.frozen else round(time.perf_counter() - self.t0, 3)


def encode(value):
    """(value_exact, value_float) for a CycValue, Fraction or complex."""
    if value is None:
        return None, None
    if isinstance(value, CycValue):
        z = value.to_complex()
        return value.to_json(), {"re": z.real, "im": z.imag}
    if isinstance(value, (int, Fraction)):
        return str(Fraction(value)), {"re": float(value), "im": 0.0}
    z = complex(value)
    return None, {"re": z.real, "im": z.imag}


def record(scenario, params, value, expected, passed, anchor, seconds, skipped=None):
    exact, flt = encode(value)
    if skipped:
        verdict = f"skipped({skipped})"
    else:
        verdict = "pass" if passed else "fail"
    return {
        "scenario": scenario,
        "params": _jsonable(params),
        "value_exact": exact,
        "value_float": flt,
        "expected": expected,
        "verdict": verdict,
        "anchor": anchor,
        "seconds": seconds,
    }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return str(x)


# ---------------------------------------------------------------- building objects from flags


def _backend(args):
    return get_backend(args.backend)


def _rep(args):
    if args.rep == "ps":
        return S.ps_for(args.p, args.cpi, args.theta_index, _backend(args))
    return S.sc_for(args.p, args.cpi, args.theta_index, args.xi, args.precision, _backend(args))


def _torus(args):
    return make_params(args.p, args.ext, args.precision, xi=args.xi)


def _eta(args, rep):
    if args.eta_level is None or args.eta_level == 0:
        return None
    L = rep.L if hasattr(rep, "theta") else max(rep.chi1.L, rep.chi2.L, args.eta_level)
    return S.eta_for(args.p, args.eta_level, args.eta_index, L)


def _omega(args, rep, torus):
    return S.omega_for(torus, args.omega_level, args.omega_index, rep)


def _base_params(args, **extra):
    out = {"p": args.p, "ext": args.ext, "rep": args.rep, "cpi": args.cpi, "backend": args.backend}
    out.update(extra)
    return out


# ---------------------------------------------------------------- subcommands


def cmd_gauss(args):
    """Gauss sums of every character of a given level, shell by shell."""
    level = args.eta_level if args.eta_level is not None else 1
    chars = [c for c in S.enumerate_chars(args.p, level) if c.conductor == level]
    if not 0 <= args.eta_index < len(chars):
        raise InvalidParameter(f"character index out of range 0..{len(chars) - 1}")
    chi = chars[args.eta_index]
    backend = _backend(args)
    rows = []
    for j in range(0, level + 2):
        with _Clock(args.deterministic) as clk:
            g = gauss_sum(chi, Fraction(1, args.p**j), backend)
            if j == level:
                want = Fraction(args.p, (args.p - 1) ** 2 * args.p ** (level - 1))
                ok = backend.equal(g * backend.conj(g), backend.rational(want))
                expected = f"|G|^2 = {want}"
            else:
                ok = backend.is_zero(g) if j > 0 else True
                expected = "0" if j > 0 else "any"
            ok = ok and brute_conductor(chi) == level
        rows.append(
            record(
                "gauss",
                {"p": args.p, "level": level, "index": chi.s, "shell": j, "backend": args.backend},
                g,
                expected,
                ok,
                "int_{O*} chi(u) psi(u / p^j) d*u vanishes unless j = c(chi)",
                clk.seconds,
            )
        )
    return rows


def cmd_epsilon(args):
    """Epsilon-factor quotients C_nu / C_1 against the closed formula."""
    if args.rep != "sc":
        raise InvalidParameter("epsilon factors are computed for supercuspidal data")
    sc = _rep(args)
    eta = _eta(args, sc) or MultChar.trivial(args.p, sc.L)
    backend = sc.backend
    with _Clock(args.deterministic) as clk:
        eps = epsilon_factor(sc, eta)
        ok = backend.equal(eps * backend.conj(eps), backend.one())
    params = _base_params(args, eta_level=args.eta_level, eta_index=args.eta_index)
    return [record("epsilon", params, eps, "|eps| = 1", ok, "eps(pi x eta, 1/2) from the Gauss integral over E'*", clk.seconds)]


def _point(args):
    a = Fraction(args.a)
    b = Fraction(args.b)
    return a, b


def cmd_mc(args):
    """One matrix coefficient value, with its independent cross-check."""
    backend = _backend(args)
    a, b = _point(args)
    if args.rep == "ps":
        ps = _rep(args)
        i = args.d if args.d is not None else 0
        if not 0 <= i <= ps.n:
            raise InvalidParameter(f"need 0 <= d <= {ps.n} for the Borel translate index")
        if a == 0:
            raise InvalidParameter("alpha must be nonzero")
        with _Clock(args.deterministic) as clk:
            w = ps_matrix_coefficient(ps, a, b, i)
            ind = induced_phi(ps, borel_lower(a, b, i, args.p))
            ok = backend.equal(w, ind)
        params = _base_params(args, alpha=a, m=b, i=i)
        return [record("mc", params, w, "Whittaker pairing = induced model", ok, "newform matrix coefficient of pi(1, mu)", clk.seconds)]
    sc = _rep(args)
    eta = _eta(args, sc) or MultChar.trivial(args.p, sc.L)
    d = args.d if args.d is not None else sc.k
    torus = _torus(args)
    with _Clock(args.deterministic) as clk:
        oracle = mc_oracle(sc, eta, a, b, d, torus)
        ok = True
        expected = "Kirillov evaluation"
        if d == sc.k:
            try:
                closed = mc_closed_form(sc, eta, a, b, torus)
            except InvalidParameter:
                closed = None
            if closed is not None:
                ok = backend.equal(closed, oracle)
                expected = "closed form = Kirillov evaluation"
    params = _base_params(args, a=a, b=b, d=d, eta_level=args.eta_level, eta_index=args.eta_index)
    return [record("mc", params, oracle, expected, ok, "Phi(eta) at the conjugated torus element", clk.seconds)]


def predicted_integral(rep, spec, omega, torus):
    """Exact value forced by the vanishing results, or None."""
    if not hasattr(rep, "theta"):
        return None
    try:
        if epsilon_dichotomy(rep, omega, torus) == -1:
            return Fraction(0)
    except InvalidParameter:
        pass
    k = rep.c_pi // 2
    if spec.d != k and Fraction(2, torus.e) * omega.conductor < rep.c_pi:
        return Fraction(0)
    return None


def _integral_record(args, rep, spec, omega, torus, scenario="integral"):
    predicted = predicted_integral(rep, spec, omega, torus)
    method = "closed" if hasattr(rep, "theta") and spec.d == rep.c_pi // 2 and args.method == "auto" else "oracle"
    with _Clock(args.deterministic) as clk:
        r = local_integral(rep, spec, omega, torus, method=method, predicted=predicted)
    ok = r.verdict != "mismatch"
    expected = str(predicted) if predicted is not None else "no closed prediction"
    params = _base_params(
        args,
        d=spec.d,
        eta=spec.label(),
        omega_level=args.omega_level,
        omega_index=args.omega_index,
        omega_conductor=omega.conductor,
        cosets=r.coset_count,
        depth=r.depth,
    )
    return record(scenario, params, r.value_exact, expected, ok, "I(Phi, Omega) = average of Phi(t) Omega(t) over T / Z", clk.seconds)


def cmd_integral(args):
    """A single local torus integral I(Phi, Omega)."""
    rep = _rep(args)
    torus = _torus(args)
    omega = _omega(args, rep, torus)
    d = args.d if args.d is not None else rep.c_pi // 2
    return [_integral_record(args, rep, TestVectorSpec(d, _eta(args, rep)), omega, torus)]


def cmd_sweep(args):
    """Translate sweep over d and Omega, checking the vanishing dichotomy."""
    rep = _rep(args)
    torus = _torus(args)
    omega = _omega(args, rep, torus)
    c = rep.c_pi
    if args.eta_level:
        specs = pool(rep, d_values=range(0, c + 1), eta_level=args.eta_level)
    else:
        specs = [TestVectorSpec(d) for d in range(0, c + 1)]
    return [_integral_record(args, rep, spec, omega, torus, "sweep") for spec in specs]


def cmd_decay(args):
    """Decay of |I| along spherical translates, with a fitted slope."""
    torus = make_params(args.p, "inert", args.precision)
    omega = S.omega_for(torus, args.omega_level, args.omega_index)
    with _Clock(args.deterministic) as clk:
        rows, slope, drift = decay_experiment(args.p, omega, args.n_max)
    ok = slope <= -0.375 + 0.05 and drift < 1e-9
    params = {"p": args.p, "n_max": args.n_max, "omega_level": args.omega_level, "drift": drift}
    out = [record("decay", params, complex(slope), "slope <= -0.325", ok, "log_q |I| against n for spherical translates", clk.seconds)]
    for row in rows:
        n, val = row[0], row[1]
        out.append(record("decay-point", {"p": args.p, "n": n}, complex(val), "decaying", True, "spherical translate d = -n", 0.0))
    return out


# ---------------------------------------------------------------- scenario runner


_OVERRIDES = {"p": "p", "cpi": "c_pi", "xi": "xi"}


def _overrides(scn, args):
    sig = inspect.signature(scn.run).parameters
    out = dict(scn.kwargs)
    for flag, kw in _OVERRIDES.items():
        val = getattr(args, flag, None)
        if val is not None and kw in sig and flag in args.explicit:
            out[kw] = val
    return out


def run_scenario(sid, kwargs, frozen=False):
    scn = S.get(sid)
    t0 = time.perf_counter()
    o = scn.run(**kwargs)
    seconds = 0.0 if frozen else round(time.perf_counter() - t0, 3)
    params = dict(o.params)
    params.update({k: v for k, v in o.details.items() if k != "rows"})
    return record(sid, params, o.value, o.expected, o.passed, scn.anchor, seconds)


def cmd_verify(args):
    """Run registered scenarios and report pass/fail per scenario."""
    chosen = S.find(args.filter)
    if not chosen:
        raise InvalidParameter(f"no scenario matches {args.filter!r}")
    jobs = [(s.id, _overrides(s, args), args.deterministic) for s in chosen]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            # map keeps submission order, so the merged report is deterministic
            return list(ex.map(run_scenario, *zip(*jobs)))
    return [run_scenario(*j) for j in jobs]


COMMANDS = {
    "gauss": cmd_gauss,
    "epsilon": cmd_epsilon,
    "mc": cmd_mc,
    "integral": cmd_integral,
    "sweep": cmd_sweep,
    "decay": cmd_decay,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------- output


def to_json(rows):
    return json.dumps(rows, sort_keys=True, indent=2) + "\n"


def to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scenario", "params", "value_exact", "value_float_re", "value_float_im", "expected", "verdict", "anchor", "seconds"])
    for r in rows:
        flt = r["value_float"] or {"re": "", "im": ""}
        exact = r["value_exact"]
        if isinstance(exact, dict):
            exact = json.dumps(exact, sort_keys=True)
        w.writerow(
            [r["scenario"], json.dumps(r["params"], sort_keys=True), exact, flt["re"], flt["im"], r["expected"], r["verdict"], r["anchor"], r["seconds"]]
        )
    return buf.getvalue()


def emit(rows, args):
    text = to_json(rows) if args.out == "json" else to_csv(rows)
    out_dir = args.output_dir or os.environ.get(OUT_ENV)
    if out_dir:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        target = path / f"{args.command}.{args.out}"
        target.write_text(text)
        passed = sum(r["verdict"] == "pass" for r in rows)
        print(f"{passed}/{len(rows)} pass -> {target}", file=sys.stderr)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=5, help="residue characteristic (>= 5)")
    common.add_argument("--ext", choices=["inert", "ramified"], default="inert", help="torus extension type")
    common.add_argument("--rep", choices=["sc", "ps"], default="sc", help="supercuspidal or principal series")
    common.add_argument("--cpi", type=int, default=4, help="conductor of pi (supercuspidal) or level of mu (principal series)")
    common.add_argument("--theta-index", type=int, default=0, help="index of theta (or mu) in enumeration order")
    common.add_argument("--eta-level", type=int, default=None)
    common.add_argument("--eta-index", type=int, default=0)
    common.add_argument("--omega-level", type=int, default=0)
    common.add_argument("--omega-index", type=int, default=0)
    common.add_argument("--d", type=int, default=None, help="translate exponent; defaults to floor(c/2)")
    common.add_argument("--xi", type=int, default=None, help="ramified D = p xi")
    common.add_argument("--a", default="1", help="torus / Borel coordinate a (alpha for principal series)")
    common.add_argument("--b", default="0", help="torus / Borel coordinate b (m for principal series)")
    common.add_argument("--method", choices=["auto", "oracle"], default="auto")
    common.add_argument("--n-max", type=int, default=6)
    common.add_argument("--backend", choices=["exact", "float"], default="exact")
    common.add_argument("--out", choices=["json", "csv"], default="json")
    common.add_argument("--output-dir", default=None, help=f"write <command>.<out> here (default ${OUT_ENV}, else stdout)")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--precision", type=int, default=6)
    common.add_argument("--filter", default="*", help="glob over scenario ids (verify)")
    common.add_argument("--deterministic", action="store_true", help="report seconds as 0 for byte-identical output")

    parser = argparse.ArgumentParser(prog="padic-periods", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=(fn.__doc__ or name).splitlines()[0])
    return parser


def _explicit_flags(argv):
    seen = set()
    for tok in argv:
        if tok.startswith("--"):
            seen.add(tok[2:].split("=")[0].replace("-", "_"))
    return seen


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.explicit = _explicit_flags(argv)
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        rows = COMMANDS[args.command](args)
    except (EpsilonOutOfRange, PrecisionError, CyclotomicOverflow) as exc:
        print(f"range error: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except (InvalidParameter, InvalidPrime, KeyError, ValueError) as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID
    emit(rows, args)
    return EXIT_OK if all(not r["verdict"] == "fail" for r in rows) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
