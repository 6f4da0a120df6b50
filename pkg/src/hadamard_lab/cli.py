"""Command line interface: ``hadamard-lab <command> ...``.

Exit codes: 0 success / true, 1 negative mathematical result, 2 bad usage or input.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from . import catalogue as cat
from .classify import CLASS_TOL, REAL_DIAGONAL_PATTERNS, classify_real_diagonal, solve_pattern
from .completion import NoCompletion, complete_row
from .core import (
    DEFAULT_TOL,
    TWO_PI,
    CHMatrix,
    HadamardError,
    Tolerances,
    UnitComplex,
    conjugate,
    gram_residual,
    is_hadamard,
    transpose,
)
from .equivalence import DEFAULT_BUDGET, LARGE_BUDGET, are_equivalent, lambda_difference, lambda_set


class UsageError(Exception):
    pass


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def read_matrix(path: str) -> CHMatrix:
    return CHMatrix.loads(_read_text(path))


def _tolerances(args, base: Tolerances = DEFAULT_TOL) -> Tolerances:
    """``base`` with any --tol-* flags given on the command line applied."""
    given = {k: getattr(args, k) for k in ("tol_entry", "tol_gram", "tol_lambda", "tol_equiv")}
    return dataclasses.replace(base, **{k: v for k, v in given.items() if v is not None})


def _parse_params(items) -> dict[str, float]:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {item!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise UsageError(f"--param {key}: {val!r} is not a number") from None
    return out


def _csv_lines(H: CHMatrix) -> str:
    return "\n".join(f"{z.real!r},{z.imag!r}" for z in H.entries.ravel())


def _emit_matrix(H: CHMatrix, args, out):
    if getattr(args, "csv", False):
        print(_csv_lines(H), file=out)
    else:
        print(H.dumps(args.format), file=out)


def _named_matrix(name: str, params: dict[str, float], eps_sing: float) -> CHMatrix:
    if name == "fourier":
        return cat.fourier(int(params.get("n", 6)))
    if name in ("m6-family", "m6x"):
        if "t" not in params:
            raise UsageError("m6-family needs --param t=<phase>")
        return cat.m6_family(params["t"], eps_sing)
    if name == "dita":
        a, b = params.get("a", 0.0), params.get("b", 0.0)
        return cat.dita_construction(cat.fourier(2), cat.fourier(3), [[0.0, a, b]])
    if name in cat.CATALOGUE:
        if params:
            raise UsageError(f"{name} takes no parameters")
        return cat.get(name)
    raise UsageError(f"unknown matrix {name!r}; known: {', '.join([*cat.CATALOGUE, 'fourier', 'm6-family', 'dita'])}")


def cmd_gen(args, out) -> int:
    if args.from_file:
        H = read_matrix(args.from_file)
    elif args.name:
        H = _named_matrix(args.name, _parse_params(args.param), args.eps_sing)
    else:
        raise UsageError("gen needs a matrix name or --from")
    if args.conjugate:
        H = conjugate(H)
    if args.transpose:
        H = transpose(H)
    _emit_matrix(H, args, out)
    return 0


def cmd_verify(args, out) -> int:
    tol = _tolerances(args)
    H = read_matrix(args.matrix)
    ok = is_hadamard(H, tol)
    print(json.dumps({"hadamard": ok, "n": H.n, "gram_residual": gram_residual(H)}), file=out)
    return 0 if ok else 1


def cmd_lambda(args, out) -> int:
    L = lambda_set(read_matrix(args.matrix), _tolerances(args))
    print(json.dumps(L.turns()), file=out)
    return 0


def cmd_equiv(args, out) -> int:
    tol = _tolerances(args)
    A, B = read_matrix(args.a), read_matrix(args.b)
    if A.n != B.n:
        raise UsageError(f"orders differ: {A.n} vs {B.n}")
    budget = LARGE_BUDGET if args.allow_large else DEFAULT_BUDGET
    LA, LB = lambda_set(A, tol), lambda_set(B, tol)
    only_a, only_b = lambda_difference(LA, LB, tol)
    if only_a.size or only_b.size:
        evidence = {
            "result": "inequivalent",
            "reason": "lambda sets differ",
            "only_in_a_turns": (only_a / TWO_PI).tolist(),
            "only_in_b_turns": (only_b / TWO_PI).tolist(),
        }
        print(json.dumps(evidence), file=out)
        return 1
    cert = are_equivalent(A, B, tol, budget=budget, use_filter=False)
    if cert is None:
        print(json.dumps({"result": "exhausted", "reason": "no permutation pair matches"}), file=out)
        return 1
    print(json.dumps({"result": "equivalent", "certificate": cert.to_json()}), file=out)
    return 0


def cmd_complete(args, out) -> int:
    xs = [UnitComplex.from_turns(t) for t in args.turns]
    try:
        rc = complete_row(*xs, tol=_tolerances(args))
    except NoCompletion as exc:
        print(json.dumps({"result": "no-completion", "reason": str(exc)}), file=out)
        return 1
    sigma = {"re": rc.sigma.real, "im": rc.sigma.imag}
    if rc.degenerate:
        print(json.dumps({"sigma": sigma, "degenerate": True}), file=out)
    else:
        print(json.dumps({"sigma": sigma, "degenerate": False, "pair_turns": [u.turns for u in rc.pair]}), file=out)
    return 0


def _family_descriptor(name: str, eps_sing: float, tol: Tolerances):
    if name == "m6":
        return cat.m6_family_descriptor(eps_sing)
    if name in ("f2f3", "f2f3-transposed"):
        return cat.load_affine_family(cat.bundled_family(name), tol=tol)
    return cat.load_affine_family(cat.AffineFamilyData.load(name), tol=tol)


def cmd_family(args, out) -> int:
    tol = _tolerances(args)
    fam = _family_descriptor(args.name, args.eps_sing, tol)
    if args.sweep:
        if fam.arity != 1:
            raise UsageError("--sweep needs a one-parameter family")
        ts = np.linspace(0.0, TWO_PI, args.sweep, endpoint=False)
        for t in ts:
            try:
                H = fam(t)
            except cat.SingularParameter:
                continue
            nums = ",".join(f"{v!r}" for z in H.entries.ravel() for v in (z.real, z.imag))
            print(f"{t!r},{nums}", file=out)
        return 0
    if args.t is not None:
        params = [args.t]
    else:
        params = args.p or []
    if len(params) != fam.arity:
        raise UsageError(f"family {fam.name} needs {fam.arity} parameter(s)")
    _emit_matrix(fam(*params), args, out)
    return 0


def cmd_classify(args, out) -> int:
    tol = _tolerances(args, CLASS_TOL)
    if args.real_diagonal:
        rep = classify_real_diagonal(args.seeds, args.rng, tol)
        text = rep.dumps()
        summaries = [r.summary() for r in rep.reports.values()]
        found = any(r.converged_count for r in rep.reports.values())
    else:
        if not args.pattern:
            raise UsageError("classify needs --pattern or --real-diagonal")
        tied = None
        if args.tie_row2:
            tied = [float(v) for v in args.tie_row2.split(",")]
        r = solve_pattern(args.pattern, args.seeds, args.rng, tol, tied_row2=tied)
        text = r.dumps()
        summaries = [r.summary()]
        found = r.converged_count > 0
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        for s in summaries:
            print(s, file=out)
    else:
        print(text, file=out)
    return 0 if found else 1


def endpoint_checks(delta: float = 1e-5, eps_sing: float = cat.EPS_SING, tol: Tolerances = DEFAULT_TOL) -> list[dict]:
    """The three endpoint facts of the family M6(x)."""
    checks = []
    cert = are_equivalent(cat.m6_family(0.0, eps_sing), cat.fourier(6), tol)
    checks.append({"name": "M6(1) ~ F6", "pass": cert is not None, "certificate": cert.to_json() if cert else None})

    t = 3 * math.pi / 2 - delta
    near = cat.m6_family(t, min(eps_sing, abs(delta) / 2) if delta else eps_sing)
    limit = cat.dita_d6()
    swap = [0, 1, 2, 3, 5, 4]
    direct = float(np.max(np.abs(near.entries - limit.entries)))
    relabelled = float(np.max(np.abs(near.entries[np.ix_(swap, swap)] - limit.entries)))
    bound = 10 * abs(delta)
    rep_ok = are_equivalent(limit, cat.d6_symmetric(), tol) is not None
    checks.append(
        {
            "name": "M6(e^{it}) -> D6 as t -> 3pi/2",
            "pass": min(direct, relabelled) <= bound and rep_ok,
            "t": t,
            "distance_direct": direct,
            "distance_rows_cols_5_6_swapped": relabelled,
            "bound": bound,
            "limit_equivalent_to_d6_representative": rep_ok,
        }
    )

    t0 = math.acos((1 - math.sqrt(13)) / 3)
    err = float(np.max(np.abs(cat.m6_family(t0, eps_sing).entries - cat.m6_discrete().entries)))
    checks.append({"name": "M6(x1) equals the discrete M6", "pass": err <= 1e-10, "t": t0, "distance": err})
    return checks


def cmd_endpoints(args, out) -> int:
    if args.delta == 0:
        raise cat.SingularParameter("delta = 0 evaluates the family at the excluded point x = -i")
    checks = endpoint_checks(args.delta, args.eps_sing, _tolerances(args))
    passed = sum(c["pass"] for c in checks)
    print(json.dumps({"checks": checks, "passed": passed, "total": len(checks)}, indent=2), file=out)
    return 0 if passed == len(checks) else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-entry", type=float, help=f"default {DEFAULT_TOL.tol_entry:g}")
    common.add_argument("--tol-gram", type=float, help=f"default {DEFAULT_TOL.tol_gram:g}")
    common.add_argument("--tol-lambda", type=float, help=f"default {DEFAULT_TOL.tol_lambda:g}")
    common.add_argument("--tol-equiv", type=float, help=f"default {DEFAULT_TOL.tol_equiv:g}")

    out_fmt = argparse.ArgumentParser(add_help=False)
    out_fmt.add_argument("--format", choices=("phases", "rect"), default="phases", help="JSON matrix form")
    out_fmt.add_argument("--csv", action="store_true", help="flat re,im per entry, row-major")

    p = argparse.ArgumentParser(prog="hadamard-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common, out_fmt], help="emit a catalogue matrix")
    g.add_argument("name", nargs="?", help="f6, s6, d6, d6-sym, c6, m6, m6-one, f2f3, fourier, m6-family, dita")
    g.add_argument("--param", action="append", metavar="KEY=VALUE", help="e.g. t=0.5 for m6-family, n=4 for fourier")
    g.add_argument("--from", dest="from_file", metavar="FILE", help="re-emit a matrix read from FILE ('-' = stdin)")
    g.add_argument("--conjugate", action="store_true")
    g.add_argument("--transpose", action="store_true")
    g.add_argument("--eps-sing", type=float, default=cat.EPS_SING)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", parents=[common], help="check the Hadamard property")
    v.add_argument("matrix")
    v.set_defaults(func=cmd_verify)

    lam = sub.add_parser("lambda", parents=[common], help="Haagerup Lambda-set in turns")
    lam.add_argument("matrix")
    lam.set_defaults(func=cmd_lambda)

    e = sub.add_parser("equiv", parents=[common], help="decide equivalence of two matrices")
    e.add_argument("a")
    e.add_argument("b")
    e.add_argument("--allow-large", action="store_true", help="permit orders 7 and 8")
    e.set_defaults(func=cmd_equiv)

    c = sub.add_parser("complete", parents=[common], help="complete a dephased row from four entries (turns)")
    c.add_argument("turns", type=float, nargs=4)
    c.set_defaults(func=cmd_complete)

    f = sub.add_parser("family", parents=[common, out_fmt], help="evaluate a parametric family")
    f.add_argument("name", help="m6, f2f3, f2f3-transposed, or a path to affine family JSON")
    f.add_argument("--t", type=float, help="phase of x = e^{it} for m6")
    f.add_argument("--p", type=float, nargs="+", help="parameter vector for affine families")
    f.add_argument("--sweep", type=int, metavar="N", help="CSV of N equispaced t in [0, 2pi)")
    f.add_argument("--eps-sing", type=float, default=cat.EPS_SING)
    f.set_defaults(func=cmd_family)

    k = sub.add_parser("classify", parents=[common], help="search dephased symmetric matrices with a given diagonal")
    k.add_argument("--pattern", help="e.g. 1,-1,-1,-1,*,*  (* = +-1 subcases, f = free slot)")
    k.add_argument("--real-diagonal", action="store_true", help=f"run all of {', '.join(REAL_DIAGONAL_PATTERNS)}")
    k.add_argument("--tie-row2", metavar="C3,...,C6", help="tie row 2 entries 3..6 to one phase with these signs")
    k.add_argument("--seeds", type=int, default=2000)
    k.add_argument("--rng", type=int, default=0)
    k.add_argument("--out", metavar="FILE")
    k.set_defaults(func=cmd_classify)

    d = sub.add_parser("endpoints", parents=[common], help="check the endpoints of the M6(x) family")
    d.add_argument("--delta", type=float, default=1e-5, help="approach 3pi/2 from t = 3pi/2 - delta")
    d.add_argument("--eps-sing", type=float, default=cat.EPS_SING)
    d.set_defaults(func=cmd_endpoints)
    return p


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except (UsageError, HadamardError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"hadamard-lab {args.command}: error: {msg}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
