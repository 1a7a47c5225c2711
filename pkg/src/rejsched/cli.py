"""``rejsched`` command line: gen, solve, check, bench, lp solve.

Exit codes: 0 success, 1 other failure (including a ratio violation in
bench), 2 infeasible solution, 3 enumeration cap exceeded, 4 parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import approx1, bench, eptas, lp, oracle
from .errors import CapExceeded, OracleTimeout, ParseError, RejschedError, TooLarge
from .instance import as_rational, parse_instance, parse_solution, serialize_instance, serialize_solution

EXIT_OK, EXIT_FAIL, EXIT_INFEASIBLE, EXIT_CAP, EXIT_PARSE = 0, 1, 2, 3, 4


def _rational(text):
    try:
        return as_rational(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_range(text):
    lo, _, hi = text.partition(":")
    try:
        lo = int(lo)
        hi = int(hi) if hi else lo
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    return lo, hi


def _int_list(text):
    return tuple(int(t) for t in text.split(","))


def _rational_list(text):
    return tuple(_rational(t) for t in text.split(","))


def _write(path, data: bytes):
    if path in (None, "-"):
        sys.stdout.write(data.decode())
    else:
        Path(path).write_bytes(data)


def _read(path) -> bytes:
    return sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()


def cmd_gen(args):
    config = bench.GeneratorConfig(
        n=args.n,
        m=args.m,
        seed=args.seed,
        p_range=args.p_range,
        e_range=args.e_range,
        budget_mode=args.budget_mode,
        alpha=args.alpha,
        budget=args.budget,
    )
    _write(args.out, serialize_instance(bench.gen(config)))
    return EXIT_OK


def cmd_solve(args):
    instance = parse_instance(_read(args.instance))
    diag = None
    code = EXIT_OK
    if args.algo == "approx1":
        solution, report = approx1.run(instance)
    elif args.algo == "exact":
        limits = oracle.OracleLimits(args.max_jobs, args.max_machines, args.timeout)
        solution, report = oracle.solve_exact(instance, limits)
    else:
        caps = eptas.Caps(max_lp_solves=args.max_candidates) if args.max_candidates else eptas.Caps()
        try:
            solution, report, diag = eptas.run(instance, args.eps, caps)
        except CapExceeded as exc:
            solution, report, diag = exc.partial
            print(f"warning: {exc}; result carries no guarantee", file=sys.stderr)
            code = EXIT_CAP
        if args.diag:
            Path(args.diag).write_text(json.dumps(diag.to_dict(), indent=1) + "\n")
    if args.out:
        _write(args.out, serialize_solution(solution))
    out = {"algo": args.algo, "decisions": list(solution.decisions), "report": report.to_dict()}
    print(json.dumps(out))
    return code


def cmd_check(args):
    instance = parse_instance(_read(args.instance))
    solution = parse_solution(_read(args.solution))
    report, violations = bench.check(instance, solution)
    if violations:
        for v in violations:
            print(f"violation: {v}")
        return EXIT_INFEASIBLE
    print(json.dumps(report.to_dict()))
    return EXIT_OK


def cmd_bench(args):
    suite = bench.SuiteConfig(
        count=args.count,
        seed0=args.seed,
        n_range=args.n,
        m_values=args.m,
        eps=args.eps,
        p_range=args.p_range,
        e_range=args.e_range,
        alphas=args.alpha,
        limits=oracle.OracleLimits(args.max_jobs, args.max_machines, args.timeout),
        caps=eptas.Caps(max_lp_solves=args.max_candidates) if args.max_candidates else eptas.Caps(),
        timing=args.timing,
        dump_dir=args.dump_solutions,
        workers=args.workers,
    )
    text = bench.bench(suite)
    _write(args.out, text.encode())
    summary = text.rstrip("\n").rsplit("\n", 1)[-1]
    return EXIT_OK if summary.endswith(",ok") else EXIT_FAIL


def cmd_lp_solve(args):
    program = lp.parse_lp(_read(args.file).decode())
    sys.stdout.write(lp.format_vertex(lp.solve(program)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rejsched",
        description="Scheduling with rejection under a total processing-time budget.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def oracle_opts(p):
        p.add_argument("--max-jobs", type=int, default=12)
        p.add_argument("--max-machines", type=int, default=3)
        p.add_argument("--timeout", type=float, default=None, help="oracle timeout in seconds")

    p = sub.add_parser("gen", help="generate a random integer instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p-range", type=_int_range, default=(1, 20), metavar="LO:HI")
    p.add_argument("--e-range", type=_int_range, default=(0, 20), metavar="LO:HI")
    p.add_argument("--budget-mode", choices=("tight", "absolute"), default="tight")
    p.add_argument("--alpha", type=_rational, default=Fraction(1), help="budget = alpha * sum(p)")
    p.add_argument("--budget", type=_rational, default=None)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="solve an instance")
    p.add_argument("--algo", choices=("approx1", "eptas", "exact"), required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--out", default=None, help="write solution JSON here")
    p.add_argument("--eps", type=_rational, default=Fraction(1, 2))
    p.add_argument("--max-candidates", type=int, default=None, help="cap on LP solves")
    p.add_argument("--diag", default=None, help="write EPTAS diagnostics JSON here")
    oracle_opts(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="validate a solution against an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--solution", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="ratio benchmark against the exact oracle")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--n", type=_int_range, default=(1, 10), metavar="LO:HI")
    p.add_argument("--m", type=_int_list, default=(2,), metavar="M[,M...]")
    p.add_argument("--eps", type=_rational, default=Fraction(1, 2))
    p.add_argument("--p-range", type=_int_range, default=(1, 20), metavar="LO:HI")
    p.add_argument("--e-range", type=_int_range, default=(0, 20), metavar="LO:HI")
    p.add_argument("--alpha", type=_rational_list, default=(Fraction(1, 2), Fraction(1), Fraction(2)))
    p.add_argument("--max-candidates", type=int, default=None)
    p.add_argument("--timing", action="store_true", help="fill ms_* columns (output no longer byte-stable)")
    p.add_argument("--dump-solutions", default=None, metavar="DIR")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="-")
    oracle_opts(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("lp", help="LP debugging tools")
    lp_sub = p.add_subparsers(dest="lp_command", required=True)
    q = lp_sub.add_parser("solve", help="solve a plain-text LP")
    q.add_argument("file")
    q.set_defaults(func=cmd_lp_solve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (TooLarge, OracleTimeout) as exc:
        print(f"oracle: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (RejschedError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
