"""Command-line entry point: `hof <subcommand>`.

Exit codes: 0 pass, 1 verification failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .report import VerificationReport, emit_report

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _positive(name: str, value: int, minimum: int = 1) -> int:
    if value < minimum:
        raise UsageError(f"--{name} must be >= {minimum}, got {value}")
    return value


def parse_complex(text: str) -> complex:
    """Accepts 'x+yi', 'x-yi', 'yi' or a real number."""
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number {text!r}") from exc


def _finish(report: VerificationReport, args) -> int:
    if getattr(args, "json", False):
        out = emit_report(report, "json")
        if getattr(args, "out", None):
            Path(args.out).write_text(out + "\n", encoding="utf-8")
        else:
            print(out)
    else:
        print(emit_report(report, "text"))
    return EXIT_PASS if report.passed else EXIT_FAIL


# -- subcommands ---------------------------------------------------------------------


def cmd_dims(args) -> int:
    from .indices import dim_quotient, higher_weight_table, weight2_table

    _positive("genus", args.genus)
    _positive("t", args.t)
    if args.weight < 2 or args.weight % 2:
        raise UsageError("--weight must be an even integer >= 2")
    if args.weight >= 4:
        if args.dim_sk is None:
            raise UsageError("--dim-sk is required for weight >= 4")
        _positive("dim-sk", args.dim_sk, 0)
        if args.t < 2:
            raise UsageError("weight >= 4 quotients start at t = 2")
    if args.table:
        gs = list(range(1, args.genus + 1))
        if args.weight == 2:
            rows = weight2_table(gs, args.t)
            first = 1
        else:
            rows = higher_weight_table(gs, args.t, args.dim_sk)
            first = 2
        print("t\\g " + " ".join(f"{g:>8d}" for g in gs))
        for i, row in enumerate(rows):
            print(f"{first + i:<3d} " + " ".join(f"{x:>8d}" for x in row))
    else:
        print(dim_quotient(args.genus, args.t, args.weight, args.dim_sk))
    return EXIT_PASS


def cmd_shuffles(args) -> int:
    from .constructions import verify_shuffle_expansion
    from .shuffles import enumerate_shuffles

    _positive("r", args.r)
    _positive("t", args.t)
    if args.r > args.t:
        raise UsageError("need r <= t")
    if args.verify_lemma:
        return _finish(verify_shuffle_expansion(args.t), args)
    for sh in enumerate_shuffles(args.r, args.t):
        print(f"phi={list(sh.phi)} psi={list(sh.psi)}")
    return EXIT_PASS


def cmd_verify(args) -> int:
    if args.mode == "symbolic":
        from . import constructions as c

        _positive("t", args.t)
        _positive("g", args.g)
        suites = {
            "flaw": lambda: c.verify_F_law(args.g, args.t),
            "lemma310": lambda: c.verify_shuffle_expansion(args.t),
            "lemma38": lambda: c.verify_lemma_3_8(args.t, args.g),
            "zbasis": lambda: c.verify_Z_suite(args.g, args.t),
            "ybasis": lambda: c.verify_Y_suite(args.g, args.t),
        }
        return _finish(suites[args.suite](), args)
    from .periods import verify_numeric_cocycle

    if args.level != 11:
        raise UsageError("numeric verification ships data for level 11 only")
    _positive("t", args.t)
    _positive("trials", args.trials)
    _positive("terms", args.terms, 20)
    report = verify_numeric_cocycle((1,) * args.t, n_samples=args.trials, seed=args.seed, tol=args.tol,
                                    N=args.terms)
    return _finish(report, args)


def cmd_qseries(args) -> int:
    from .qseries import evaluate, load_newform

    f = load_newform(args.file)
    z = parse_complex(args.eval)
    if z.imag <= 0:
        raise UsageError("evaluation point must lie in the upper half plane")
    if z.imag < f.default_y_min:
        from .periods import NewformTransport

        val = NewformTransport(f).f_at(z)
        print(f"{val.real:.15g}{val.imag:+.15g}i  (via modular transport)")
        return EXIT_PASS
    val, tail = evaluate(f, z)
    print(f"{val.real:.15g}{val.imag:+.15g}i  tail<={tail:.3e}")
    return EXIT_PASS


_CHECK_NAMES = {"3.1": "eq3_1", "3.2": "eq3_2", "3.6": "eq3_6", "3.7": "eq3_7", "RnE": "RnE"}


def cmd_poincare(args) -> int:
    from .poincare import check_identity

    if args.level != 11:
        raise UsageError("series checks are set up for level 11")
    s = parse_complex(args.s)
    if s.real < 2:
        raise UsageError("identity checks need Re s >= 2")
    if args.k % 2:
        raise UsageError("--k must be even")
    _positive("m", args.m, 0)
    _positive("cmax", args.cmax, 0)
    report = check_identity(_CHECK_NAMES[args.check], s=s, k=args.k, m=args.m, c_max=args.cmax,
                            level=args.level, tol=args.tol)
    return _finish(report, args)


# -- parser ------------------------------------------------------------------------------


def _json_flags(p):
    p.add_argument("--json", action="store_true", help="print the JSON report")
    p.add_argument("--out", help="write the JSON report to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hof", description="Higher-order cusp form toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dims", help="dimensions of the order-t quotients")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--weight", type=int, default=2)
    p.add_argument("--dim-sk", type=int, dest="dim_sk")
    p.add_argument("--table", action="store_true", help="print rows t and columns g = 1..genus")
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("shuffles", help="list shuffles of type (r, t)")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--verify-lemma", action="store_true", dest="verify_lemma")
    _json_flags(p)
    p.set_defaults(func=cmd_shuffles)

    p = sub.add_parser("verify", help="run a verification suite")
    vs = p.add_subparsers(dest="mode", required=True)
    q = vs.add_parser("symbolic")
    q.add_argument("--suite", choices=["flaw", "lemma310", "lemma38", "zbasis", "ybasis"], required=True)
    q.add_argument("--g", type=int, default=2)
    q.add_argument("--t", type=int, default=3)
    _json_flags(q)
    q.set_defaults(func=cmd_verify)
    q = vs.add_parser("numeric")
    q.add_argument("--level", type=int, default=11)
    q.add_argument("--t", type=int, default=2)
    q.add_argument("--trials", type=int, default=10)
    q.add_argument("--terms", type=int, default=200)
    q.add_argument("--seed", type=int, default=42)
    q.add_argument("--tol", type=float)
    _json_flags(q)
    q.set_defaults(func=cmd_verify)

    p = sub.add_parser("qseries", help="evaluate a coefficient file")
    p.add_argument("--file", help="coefficient file (default: shipped level 11 newform)")
    p.add_argument("--eval", required=True, help="point x+yi")
    p.set_defaults(func=cmd_qseries)

    p = sub.add_parser("poincare", help="Maass-operator identities for truncated series")
    p.add_argument("--check", choices=list(_CHECK_NAMES), required=True)
    p.add_argument("--level", type=int, default=11)
    p.add_argument("--s", default="2")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--cmax", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-4)
    _json_flags(p)
    p.set_defaults(func=cmd_poincare)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASS
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"hof: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"hof: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
