"""Command line entry point.

Exit codes: 0 corroborated (or plain success), 1 violated, 2 inconclusive,
3 usage error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import replay as rp
from .bounds import THM2, THM3, derive_caps
from .formulas import FormulaSyntaxError, find_occurrence, parse_formula
from .generator import COUNT, ENUMERATE, LEX_LEAST, SAMPLE, EnumerationSpec, EnumerationStats, NoFreeWord, iter_free, sample_free
from .morphisms import load_morphism, paper_morphism_9, paper_morphism_21
from .words import Alphabet, FreenessSpec

USAGE_ERROR = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def _common() -> argparse.ArgumentParser:
    # SUPPRESS lets the flags appear before or after the subcommand
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print JSON")
    p.add_argument("--threads", type=_positive, default=argparse.SUPPRESS, help="worker processes")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for sampling modes")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="revavoid", description="Avoidability checks for formulas with reversal.", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bounds", parents=[common], help="derive image-length caps")
    b.add_argument("--template", choices=[THM2, THM3], required=True)
    b.add_argument("--beta", type=_fraction, required=True)
    b.add_argument("--d", type=int, required=True)

    e = sub.add_parser("enumerate", parents=[common], help="stream free words, one per line")
    e.add_argument("--alphabet", type=_positive, required=True)
    e.add_argument("--beta", type=_fraction, required=True)
    e.add_argument("--min-period", type=_positive, default=1)
    e.add_argument("--length", type=_positive, required=True)
    e.add_argument("--mode", choices=[ENUMERATE, COUNT, LEX_LEAST, SAMPLE], default=ENUMERATE)

    o = sub.add_parser("occurrence", parents=[common], help="find the first occurrence of a formula in a word")
    o.add_argument("--formula", required=True)
    o.add_argument("--word", required=True)
    o.add_argument("--cap", type=_positive, default=None, help="cap on every image length (default |word|)")

    r = sub.add_parser("replay", parents=[common], help="run a replay pipeline")
    rs = r.add_subparsers(dest="pipeline", required=True, parser_class=_Parser)

    p = rs.add_parser("thm1-upper", parents=[common])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--prefix-len", type=_positive, required=True)
    p.add_argument("--cap", type=_positive, default=2)

    p = rs.add_parser("thm1-lower", parents=[common])
    p.add_argument("--b", type=_positive, required=True)
    p.add_argument("--max-len", type=_positive, required=True)
    p.add_argument("--budget", type=_positive, default=None)

    for name in (THM2, THM3):
        p = rs.add_parser(name, parents=[common])
        p.add_argument("--source-len", type=_positive, required=True)
        p.add_argument("--source-beta", type=_fraction, default=Fraction(7, 4))
        p.add_argument("--budget", type=_positive, default=None)
        g = p.add_mutually_exclusive_group()
        for choice in rp.CAP_CHOICES:
            g.add_argument(f"--{choice}-caps", dest="caps", action="store_const", const=choice)
        p.set_defaults(caps="max")

    p = rs.add_parser("transfer", parents=[common])
    p.add_argument("--morphism", required=True, help="'21', '9', or a file of '<letter> -> <image>' lines")
    p.add_argument("--source-beta", type=_fraction, default=Fraction(7, 4))
    p.add_argument("--source-len", type=_positive, required=True)
    p.add_argument("--target-beta", type=_fraction, required=True)
    p.add_argument("--target-period", type=_positive, default=1)
    p.add_argument("--d", type=_positive, required=True)

    p = rs.add_parser("psi", parents=[common])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--source-len", type=_positive, required=True)
    p.add_argument("--x-cap", type=_positive, required=True)
    p.add_argument("--budget", type=_positive, default=None)

    p = rs.add_parser("nonavoid2", parents=[common])
    p.add_argument("--max-len", type=_positive, required=True)
    p.add_argument("--budget", type=_positive, default=None)
    return parser


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _run_bounds(args) -> int:
    report = derive_caps(args.template, args.beta, args.d)
    if report.bounded:
        text = f"{args.template} beta={report.beta} d={report.d}: r={report.r} c={report.c} long<={report.long_var_max} short<={report.short_var_max}"
    else:
        text = f"{args.template} beta={report.beta} d={report.d}: r={report.r} >= 1, no finite bound"
    if report.paper_long_var_max is not None:
        text += f" (printed: c={report.paper_c} long<={report.paper_long_var_max} short<={report.paper_short_var_max})"
    _emit(args, report.to_json(), text)
    return 0


def _run_enumerate(args) -> int:
    es = EnumerationSpec(Alphabet(args.alphabet), FreenessSpec(args.beta, args.min_period), args.length, args.mode)
    stats = EnumerationStats()
    if args.mode == SAMPLE:
        try:
            print(sample_free(es, random.Random(args.seed)))
        except NoFreeWord as err:
            print(err, file=sys.stderr)
            return 2
        return 0
    for w in iter_free(es.alphabet, es.spec, es.length, stats=stats):
        if args.mode != COUNT:
            print(w)
        if args.mode == LEX_LEAST:
            break
    print(json.dumps(stats.to_json(), sort_keys=True))
    return 0 if stats.count else 2


def _run_occurrence(args) -> int:
    f = parse_formula(args.formula)
    Alphabet(36).check(args.word)
    a = find_occurrence(args.word, f, args.cap or len(args.word))
    payload = {"formula": str(f), "word": args.word, "occurrence": None if a is None else a.to_json()}
    _emit(args, payload, "no occurrence" if a is None else json.dumps(a.to_json(), sort_keys=True))
    return 0 if a is None else 1


def _morphism(text: str):
    if text == "21":
        return paper_morphism_21()
    if text == "9":
        return paper_morphism_9()
    try:
        return load_morphism(text)
    except OSError as err:
        raise UsageError(f"cannot read morphism file: {err}") from None


def _run_replay(args) -> int:
    name = args.pipeline
    if name == "thm1-upper":
        report = rp.replay_theorem1_upper(args.k, args.prefix_len, args.cap)
    elif name == "thm1-lower":
        report = rp.replay_theorem1_lower(args.b, args.max_len, args.budget)
    elif name in (THM2, THM3):
        report = rp.replay_theorem(
            name,
            args.source_len,
            args.caps,
            source_spec=FreenessSpec(args.source_beta),
            budget=args.budget,
            threads=args.threads,
        )
    elif name == "transfer":
        report = rp.replay_transfer(
            _morphism(args.morphism),
            FreenessSpec(args.source_beta),
            args.source_len,
            FreenessSpec(args.target_beta, args.target_period),
            args.d,
            threads=args.threads,
        )
    elif name == "psi":
        report = rp.replay_psi(args.k, args.source_len, args.x_cap, budget=args.budget, threads=args.threads)
    else:
        report = rp.replay_nonavoid2(args.max_len, budget=args.budget)
    lines = [report.summary()]
    lines += [f"  witness: {json.dumps(w, sort_keys=True)}" for w in report.witnesses[:1]]
    lines += [f"  note: {n}" for n in report.notes]
    lines.append(f"  stats: {json.dumps(report.stats, sort_keys=True)}")
    _emit(args, report.to_json(), "\n".join(lines))
    return report.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key, default in (("json", False), ("threads", 1), ("seed", None)):
        if not hasattr(args, key):
            setattr(args, key, default)
    run = {"bounds": _run_bounds, "enumerate": _run_enumerate, "occurrence": _run_occurrence, "replay": _run_replay}
    try:
        return run[args.command](args)
    except (UsageError, FormulaSyntaxError, ValueError) as err:
        print(f"revavoid: error: {err}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
