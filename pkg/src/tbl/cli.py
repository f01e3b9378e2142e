"""Command-line interface: ``tbl <subcommand> ...``.

Exit codes: 0 on success, 1 when a check fails, 2 on bad input (parse or
arity errors, invalid flags).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence

from . import bmw, verify
from .qfield import ScalarParseError, to_string
from .rep import F_eval, FunctorImage, RepParams
from .tangles import ArityError, TangleSyntaxError, parse

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class CliConfig:
    command: str
    m: int = 1
    n: Optional[int] = None
    backend: str = "matrix"
    degree_bound: Optional[int] = None
    json: bool = False
    out: Optional[str] = None
    mutate: Optional[str] = None

    def __post_init__(self):
        if self.m < 1:
            raise InputError("--m must be >= 1")
        if self.n is not None and self.n < 1:
            raise InputError("--n must be >= 1")
        if self.degree_bound is not None and self.degree_bound < 0:
            raise InputError("--degree-bound must be >= 0")


def _threads():
    """Honour TBL_THREADS as a cap on numeric library threads."""
    cap = os.environ.get("TBL_THREADS")
    if cap:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, cap)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", type=int, default=1, help="rank of sp_2m (default 1)")
    common.add_argument("--n", type=int, default=None, help="number of strands")
    common.add_argument("--backend", choices=("matrix", "generic"), default="matrix")
    common.add_argument("--degree-bound", type=int, default=None)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--out", default=None, help="write output to a file")

    p = argparse.ArgumentParser(prog="tbl", description="Exact tangle and BMW algebra computations.")
    sub = p.add_subparsers(dest="command", required=True)
    e = sub.add_parser("eval", parents=[common], help="evaluate a tangle (or, with --n, a BMW element)")
    e.add_argument("expr", help="expression text, or @path to read it from a file")
    t = sub.add_parser("trace", parents=[common], help="closure trace of a BMW element at r=-q^(2m+1)")
    t.add_argument("expr")
    y = sub.add_parser("yb", parents=[common], help="Yang-Baxter element of a reduced word")
    y.add_argument("word", help="indices of the reduced word, e.g. '3 2 1 3 4'")
    y.add_argument("--expand", action="store_true", help="also print the factors")
    sub.add_parser("dims", parents=[common], help="word-span and image ranks")
    q = sub.add_parser("equal", parents=[common], help="decide equality of two BMW elements")
    q.add_argument("lhs")
    q.add_argument("rhs")
    c = sub.add_parser("check", parents=[common], help="run one claim, e.g. 'yb.kernel[m=1]'")
    c.add_argument("claim")
    c.add_argument("--mutate", choices=verify.ALL_MUTATIONS, default=None)
    v = sub.add_parser("verify", parents=[common], help="run the verification suite")
    v.add_argument("--mutate", choices=verify.ALL_MUTATIONS, default=None)
    v.add_argument("--markdown", action="store_true", help="markdown table instead of JSON")
    v.add_argument("--timing", action="store_true", help="include wall times")
    v.add_argument("--list", action="store_true", help="list registry entries and exit")
    return p


def _read(expr: str) -> str:
    if expr.startswith("@"):
        with open(expr[1:]) as fh:
            return fh.read()
    return expr


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _need_n(args) -> int:
    if args.n is None:
        raise InputError("--n is required")
    return args.n


def cmd_eval(args) -> int:
    text = _read(args.expr)
    image = FunctorImage(RepParams(args.m))
    if args.n is not None:
        op = bmw.element_operator(bmw.parse_element(text, args.n), image)
    else:
        op = F_eval(parse(text), image)
    _emit(op.dumps(), args.out)
    return EXIT_OK


def cmd_trace(args) -> int:
    n = _need_n(args)
    res = bmw.markov_trace(bmw.parse_element(_read(args.expr), n), RepParams(args.m))
    if args.json:
        doc = {"value": to_string(res.value),
               "symbolic": None if res.symbolic_value is None else to_string(res.symbolic_value),
               "agree": res.agree, "note": res.note}
        _emit(json.dumps(doc, sort_keys=True), args.out)
    else:
        _emit(to_string(res.value), args.out)
    return EXIT_OK


def cmd_yb(args) -> int:
    try:
        idx = tuple(int(t) for t in args.word.replace(",", " ").split())
    except ValueError:
        raise InputError(f"bad word {args.word!r}") from None
    n = args.n if args.n is not None else (max(idx) + 1 if idx else 1)
    pairs = bmw.yb_labels(idx, n)
    text = bmw.format_yb(pairs)
    if args.json:
        doc = {"word": list(idx), "n": n, "labels": [list(p) for p in pairs], "text": text}
        if args.expand:
            doc["factors"] = [bmw.format_element(bmw.yb_factor(i, k, n)) for i, k in pairs]
        _emit(json.dumps(doc, sort_keys=True), args.out)
    else:
        lines = [text]
        if args.expand:
            lines += [f"Y{i}({k}) = {bmw.format_element(bmw.yb_factor(i, k, n))}" for i, k in pairs]
        _emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_dims(args) -> int:
    n = _need_n(args)
    wb = bmw.word_basis(n, max(args.m, n))
    data = verify.rank_data(n, args.m)
    doc = {"n": n, "m": args.m, "basis_size": bmw.bmw_dim(n), "word_span": wb.dim,
           "image_rank": data.rank, "kernel_dim": bmw.bmw_dim(n) - data.rank, "method": data.method}
    if data.ideal is not None:
        doc["ideal_dim"] = data.ideal
    if args.json:
        _emit(json.dumps(doc, sort_keys=True), args.out)
    else:
        _emit("\n".join(f"{k}: {v}" for k, v in doc.items()), args.out)
    return EXIT_OK


def cmd_equal(args) -> int:
    n = _need_n(args)
    a, b = bmw.parse_element(_read(args.lhs), n), bmw.parse_element(_read(args.rhs), n)
    cert = bmw.generic_equal(a, b, degree_bound=args.degree_bound, backend=args.backend)
    _emit(json.dumps(cert.to_json(), sort_keys=True) if args.json else str(cert.equal).lower(), args.out)
    return EXIT_OK if cert.equal else EXIT_FAIL


def cmd_check(args) -> int:
    try:
        name, params = verify.parse_claim_id(args.claim)
    except KeyError as exc:
        raise InputError(str(exc)) from None
    if name == "yb.braid" and args.backend == "generic":
        params = dict(params, backend="generic")
    try:
        rec = verify.run_claim(name, args.mutate, **params)
    except TypeError as exc:
        raise InputError(f"bad parameters for {name}: {exc}") from None
    if args.json:
        _emit(json.dumps(rec.to_json(), sort_keys=True, indent=2), args.out)
    else:
        _emit(f"{rec.id}: {rec.status}", args.out)
    return EXIT_OK if rec.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    if args.list:
        _emit("\n".join(f"{c.name}\t{c.kind}\t{c.quote}" for c in sorted(verify.REGISTRY.values(),
                                                                          key=lambda c: c.name)), args.out)
        return EXIT_OK
    cfg = verify.SuiteConfig(mutate=args.mutate)
    if args._m_given:
        cfg.ms = (args.m,)
    if args.n is not None:
        cfg.ns = (args.n,)
    records = verify.run_suite(cfg)
    fmt = "markdown" if args.markdown else "json"
    _emit(verify.emit_report(records, fmt, timing=args.timing), args.out)
    return EXIT_OK if verify.all_passed(records) else EXIT_FAIL


COMMANDS = {"eval": cmd_eval, "trace": cmd_trace, "yb": cmd_yb, "dims": cmd_dims, "equal": cmd_equal,
            "check": cmd_check, "verify": cmd_verify}


def run(argv: Optional[Sequence[str]] = None) -> int:
    _threads()
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    args._m_given = any(a == "--m" or a.startswith("--m=") for a in argv)
    try:
        CliConfig(args.command, args.m, args.n, args.backend, args.degree_bound, args.json, args.out)
        return COMMANDS[args.command](args)
    except (InputError, TangleSyntaxError, ArityError, ScalarParseError, bmw.NotReducedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
