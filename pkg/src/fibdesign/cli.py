"""Command-line front end.

Every subcommand prints a plain-text table, or the versioned JSON report with
``--json``. Exit status: 0 success, 1 domain or validation error, 2 usage or
parse error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .devgate import development_verdict, scan, verify_certificate
from .errors import DomainError, InputError, ParseError
from .fib_core import fib, fib_mod, lucas, pisano_period
from .incidence import (
    ORDER3_MATRIX,
    ORDER4_MATRIX,
    cycle_structure,
    equality_case_check,
    gl_automorphism,
    hadamard_to_design,
    kronecker,
    load_automorphism,
    load_design,
    store_automorphism,
    store_design,
    sylvester_hadamard,
    three_block_bound,
    verify_automorphism,
)
from .numtheory import DEFAULT_EFFORT, Effort
from .params import brc_test, brouwer_brc, brouwer_params, fibonacci_params, residual_params
from .report import build_report, dumps
from .tables import FibFactorSource, load_table
from .variety import DesignPoint, classify_line, lines_through, relation_along_line

METIS_RELATION = (1, 0, -1, -1, 0, 1)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _effort(args) -> Effort:
    return DEFAULT_EFFORT.scaled(args.effort) if args.effort else DEFAULT_EFFORT


def _tables(args):
    return load_table(args.table) if args.table else None


def _verdict_rows(verdict) -> list[str]:
    lines = [f"m = {verdict.m}: {verdict.status}"]
    for g in verdict.reasons:
        lines.append(f"  {g.gate:<20} {g.status:<14} {g.detail}")
    if verdict.missing:
        lines.append("  missing: " + "; ".join(verdict.missing))
    return lines


def cmd_fib(args):
    res = {"t": args.t, "fib": fib(args.t), "lucas": lucas(args.t)}
    if args.mod:
        res["modulus"] = args.mod
        res["fib_mod"] = fib_mod(args.t, args.mod)
        res["pisano_period"] = pisano_period(args.mod)
    text = [f"{k:<14} {v}" for k, v in res.items()]
    return {"t": args.t, "mod": args.mod}, res, text


def cmd_params(args):
    fp, rp = fibonacci_params(args.m), residual_params(args.m)
    brc = brc_test(fp.v, fp.k, fp.lam)
    res = {
        "symmetric": {"v": fp.v, "k": fp.k, "lambda": fp.lam, "n": fp.n},
        "residual": {"v": rp.v, "b": rp.b, "r": rp.r, "k": rp.k, "lambda": rp.lam},
        "residual_identities": rp.identities(),
        "brc": {"status": brc.status, "witness": brc.witness, "detail": brc.detail},
    }
    text = [
        f"F_{args.m} symmetric (v, k, lambda) = ({fp.v}, {fp.k}, {fp.lam}), order n = {fp.n}",
        f"residual (v, b, r, k, lambda) = ({rp.v}, {rp.b}, {rp.r}, {rp.k}, {rp.lam})",
        f"BRC: {brc.status}" + (f" witness (X, Y, Z) = {brc.witness}" if brc.witness else ""),
    ]
    return {"m": args.m}, res, text


def cmd_brc(args):
    verdict = brc_test(args.v, args.k, args.lam)
    res = {"status": verdict.status, "witness": verdict.witness, "detail": verdict.detail}
    text = [f"({args.v}, {args.k}, {args.lam}): {verdict.status}"]
    if verdict.witness:
        text.append(f"witness (X, Y, Z) = {verdict.witness}")
    text += [f"  {k}: {v}" for k, v in verdict.detail.items()]
    return {"v": args.v, "k": args.k, "lambda": args.lam}, res, text


def cmd_gate(args):
    source = FibFactorSource(_tables(args), _effort(args))
    verdict = development_verdict(args.m, source)
    check = verify_certificate(verdict.certificate) if verdict.certificate else None
    res = verdict.to_json()
    res["certificate_verified"] = None if check is None else check.ok
    res["scope"] = "ruled out for difference sets in any group, abelian or not"
    text = _verdict_rows(verdict)
    if verdict.certificate:
        text.append(f"  certificate ({verdict.certificate.gate}):")
        for k, v in verdict.certificate.witnesses.items():
            text.append(f"    {k} = {v}")
        text.append(f"  certificate verified: {check.ok}")
    return {"m": args.m, "table": args.table, "effort": args.effort}, res, text


def cmd_scan(args):
    report = scan(range(args.min, args.max + 1), _tables(args), _effort(args), args.jobs)
    res = report.to_json()
    text = [f"{'m':>5}  {'status':<14} {'gate':<20} verified"]
    for v in report.verdicts:
        gate = v.certificate.gate if v.certificate else "-"
        check = report.checks.get(v.m)
        text.append(f"{v.m:>5}  {v.status:<14} {gate:<20} {'-' if check is None else check.ok}")
    summary = report.summary()
    text.append("summary: " + ", ".join(f"{k}={n}" for k, n in summary["by_status"].items()))
    text.append(f"all certificates verified: {summary['certificates_verified']}")
    return {"min": args.min, "max": args.max, "table": args.table, "effort": args.effort}, res, text


def cmd_brouwer(args):
    v, k, lam = brouwer_params(args.q, args.t)
    general = brc_test(v, k, lam)
    res = {"v": v, "k": k, "lambda": lam, "brc": {"status": general.status, "witness": general.witness}}
    text = [f"q = {args.q}, t = {args.t}: (v, k, lambda) = ({v}, {k}, {lam})", f"BRC: {general.status}"]
    if args.q & (args.q - 1) == 0:
        fam = brouwer_brc(args.q, args.t)
        res["family_brc"] = {"status": fam.status, "witness": fam.witness, "detail": fam.detail}
        text.append(f"power-of-2 criterion: {fam.status}" + (f" witness {fam.witness}" if fam.witness else ""))
    return {"q": args.q, "t": args.t}, res, text


def _embed(A, d):
    base = len(A)
    if d < base:
        raise DomainError(f"--auto needs d >= {base}")
    return tuple(
        tuple(A[i][j] if i < base and j < base else int(i == j) for j in range(d)) for i in range(d)
    )


def _automorphism_summary(D, a) -> tuple[dict, list[str]]:
    ok = verify_automorphism(D, a)
    res = {"automorphism_valid": ok, "order": a.order}
    text = [f"automorphism valid: {ok}, order {a.order}"]
    if not ok:
        return res, text
    ct = cycle_structure(a)
    res["cycle_type"] = ct.counts()
    text.append(f"cycle type (length: count): {ct.counts()}")
    if a.order >= 3:
        rep = three_block_bound(D, a)
        res["bound"] = {"f": rep.f, "bound": rep.bound, "equality": rep.equality, "l": rep.l, "f0": rep.f0}
        text.append(f"fixed points f = {rep.f}, bound v - 3n = {rep.bound}, equality: {rep.equality}")
        if rep.equality:
            eq = equality_case_check(D, a)
            res["equality_case"] = {"passed": eq.passed, "checks": eq.checks}
            text.append(f"equality case: l = {eq.l}, order {eq.order}, f0 = {eq.f0}, passed: {eq.passed}")
    return res, text


def cmd_hadamard(args):
    base = {"order3": ORDER3_MATRIX, "order4": ORDER4_MATRIX}[args.auto]
    d = args.d if args.d is not None else len(base)
    if args.h < 1 or args.h & (args.h - 1):
        raise DomainError(f"--h must be a power of 2, got {args.h}")
    partner = sylvester_hadamard(args.h.bit_length() - 1)
    D = hadamard_to_design(kronecker(sylvester_hadamard(d), partner))
    a = gl_automorphism(_embed(base, d), partner)
    res, text = _automorphism_summary(D, a)
    res["design"] = {"v": D.v, "k": D.k, "lambda": D.lam, "validated": True}
    text.insert(0, f"design ({D.v}, {D.k}, {D.lam}) from S_{d} x H_{args.h}, N N^T validated")
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out.with_suffix(".design"), "w", encoding="utf-8") as fh:
            store_design(D, fh)
        with open(out.with_suffix(".auto"), "w", encoding="utf-8") as fh:
            store_automorphism(a, fh)
        text.append(f"wrote {out.with_suffix('.design')} and {out.with_suffix('.auto')}")
    return {"d": d, "h": args.h, "auto": args.auto}, res, text


def cmd_design_verify(args):
    with open(args.file, encoding="utf-8") as fh:
        D = load_design(fh)
    res = {"design": {"v": D.v, "k": D.k, "lambda": D.lam, "validated": True}}
    text = [f"design ({D.v}, {D.k}, {D.lam}) validated"]
    if args.auto:
        with open(args.auto, encoding="utf-8") as fh:
            a = load_automorphism(fh)
        extra, more = _automorphism_summary(D, a)
        res.update(extra)
        text += more
    return {"file": args.file, "auto": args.auto}, res, text


def cmd_variety_lines(args):
    p0 = DesignPoint.of(args.coords)
    rows = []
    text = [f"lines through {tuple(str(c) for c in p0.coords())}:"]
    for line in lines_through(p0):
        tag, sub = classify_line(line)
        metis = relation_along_line(line, METIS_RELATION)
        rows.append(
            {
                "direction": [str(x) for x in line.direction],
                "exact": line.exact,
                "multiplicity": line.multiplicity,
                "tag": tag,
                "subtag": sub,
                "metis_relation_holds": metis,
            }
        )
        label = tag + (f"/{sub}" if sub else "")
        text.append(
            f"  d = ({', '.join(str(x) for x in line.direction)})  {label:<12} x{line.multiplicity}"
            + ("  v=r+k+1 along line" if metis else "")
        )
    res = {"lines": rows, "count_with_multiplicity": sum(r["multiplicity"] for r in rows)}
    return {"point": [str(c) for c in p0.coords()]}, res, text


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the JSON report")
    tables = argparse.ArgumentParser(add_help=False)
    tables.add_argument("--table", help="factor-table file for Fibonacci numbers")
    tables.add_argument("--effort", type=int, default=0, help="multiply the Pollard-rho budget")

    parser = _Parser(prog="fibdesign", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fib", parents=[common], help="Fibonacci and Lucas numbers")
    p.add_argument("t", type=int)
    p.add_argument("--mod", type=int)
    p.set_defaults(func=cmd_fib)

    p = sub.add_parser("params", parents=[common], help="Fibonacci design parameters")
    p.add_argument("m", type=int)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("brc", parents=[common], help="Bruck-Ryser-Chowla test")
    p.add_argument("v", type=int)
    p.add_argument("k", type=int)
    p.add_argument("lam", type=int, metavar="lambda")
    p.set_defaults(func=cmd_brc)

    p = sub.add_parser("gate", parents=[common, tables], help="development verdict for one m")
    p.add_argument("m", type=int)
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("scan", parents=[common, tables], help="development verdicts for odd m <= MAX")
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--min", type=int, default=3)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("brouwer", parents=[common], help="Brouwer-type parameters and BRC")
    p.add_argument("q", type=int)
    p.add_argument("t", type=int)
    p.set_defaults(func=cmd_brouwer)

    p = sub.add_parser("hadamard", parents=[common], help="Kronecker Hadamard design with automorphism")
    p.add_argument("--d", type=int)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--auto", choices=("order3", "order4"), required=True)
    p.add_argument("--out", help="write OUT.design and OUT.auto")
    p.set_defaults(func=cmd_hadamard)

    p = sub.add_parser("design", help="design files")
    dsub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    q = dsub.add_parser("verify", parents=[common])
    q.add_argument("file")
    q.add_argument("--auto")
    q.set_defaults(func=cmd_design_verify)

    p = sub.add_parser("variety", help="the design variety")
    vsub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    q = vsub.add_parser("lines", parents=[common])
    q.add_argument("coords", nargs=5, type=_fraction, metavar="X", help="v b r k lambda")
    q.set_defaults(func=cmd_variety_lines)
    return parser


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        inputs, results, text = args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.json:
        sys.stdout.write(dumps(build_report(argv, inputs, results, __version__)))
    else:
        print("\n".join(text))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
