"""Command-line surface for all checks, bounds and experiment runs.

Exit codes: 0 for decisive verdicts and successful runs, 2 when a check
returns Unknown, 1 for runtime errors (reported as a JSON object on
stderr), 64 for usage errors. Identical argv plus seed produce
byte-identical primary outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bounds as bounds_mod
from . import experiments
from .checker import (
    DEFAULT_MAX_ENUM,
    Status,
    check_unique,
    decide_finite,
)
from .basis import canonicalize
from .constraint import build_constraint, dump_dense, dump_provenance
from .core import RankTriple
from .errors import (
    DegenerateRandomPointError,
    InsufficientSamplesError,
    InvalidRankError,
    PatternFormatError,
)
from .oracle import OracleConfig, finiteness_oracle
from .pattern import load_pattern

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors get their own exit code
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_ranks(text: str) -> RankTriple:
    parts = text.split(",")
    if len(parts) != 3:
        raise InvalidRankError(f"ranks must be 'r,r1,r2', got {text!r}")
    r, r1, r2 = (int(x) for x in parts)
    return RankTriple(r=r, r1=r1, r2=r2)


def _parse_int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",")]


def _emit(payload: dict, args, default_name: str | None = None) -> None:
    if args.format == "csv":
        lines = [f"{k},{_flat(v)}" for k, v in payload.items()]
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _flat(v) -> str:
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _oracle_config(args) -> OracleConfig:
    return OracleConfig(
        arithmetic=args.arith,
        prime=args.prime,
        svd_tolerance=args.svd_tol,
        trials=args.trials,
        seed=args.seed,
    )


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=0, help="base RNG seed")
    sub.add_argument("--trials", type=int, default=3, help="random evaluation points")
    sub.add_argument("--arith", choices=("prime", "float"), default="prime")
    sub.add_argument("--prime", type=int, default=2**31 - 1)
    sub.add_argument("--svd-tol", type=float, default=1e-9)
    sub.add_argument("--max-enum", type=int, default=DEFAULT_MAX_ENUM,
                     help="node budget for subset enumeration")
    sub.add_argument("--log-base", choices=("e", "2", "10"), default="e")
    sub.add_argument("--strict-subsets", action="store_true",
                     help="restrict certificate sets to one column per source column")
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--threads", type=int, default=0,
                     help="worker cap (0 = hardware); checks run single-process")
    sub.add_argument("--out", type=Path, default=None, help="output file (default stdout)")


def build_parser() -> _Parser:
    parser = _Parser(
        prog="mvcomplete",
        description="Finite/unique completability of two-view low-rank samplings",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_check = subs.add_parser("check", help="finite-completability verdict")
    p_check.add_argument("--pattern", type=Path, required=True)
    p_check.add_argument("--ranks", required=True, help="r,r1,r2")
    p_check.add_argument("--search", choices=("auto", "exhaustive", "greedy"),
                         default="auto")
    _add_common(p_check)

    p_unique = subs.add_parser("unique", help="unique-completability certificate")
    p_unique.add_argument("--pattern", type=Path, required=True)
    p_unique.add_argument("--ranks", required=True)
    p_unique.add_argument("--search", choices=("auto", "exhaustive", "greedy"),
                          default="auto")
    _add_common(p_unique)

    p_oracle = subs.add_parser("oracle", help="generic Jacobian-rank verdict")
    p_oracle.add_argument("--pattern", type=Path, required=True)
    p_oracle.add_argument("--ranks", required=True)
    _add_common(p_oracle)

    p_bounds = subs.add_parser("bounds", help="evaluate all sampling bounds")
    p_bounds.add_argument("--n", type=int, required=True)
    p_bounds.add_argument("--ranks", required=True)
    p_bounds.add_argument("--eps", type=float, required=True)
    p_bounds.add_argument("--m1", type=int, default=None)
    p_bounds.add_argument("--m2", type=int, default=None)
    _add_common(p_bounds)

    p_canon = subs.add_parser("canonicalize", help="canonical form of a basis")
    p_canon.add_argument("--basis", type=Path, required=True,
                         help="whitespace-separated n x r matrix")
    p_canon.add_argument("--ranks", required=True)
    _add_common(p_canon)

    p_sweep = subs.add_parser("sweep", help="bound-comparison CSVs")
    p_sweep.add_argument("--n", type=int, default=500)
    p_sweep.add_argument("--m1", type=int, default=50000)
    p_sweep.add_argument("--m2", type=int, default=50000)
    p_sweep.add_argument("--eps", type=float, default=1e-4)
    p_sweep.add_argument("--r-values", default="40,60,100")
    p_sweep.add_argument("--out-dir", type=Path, default=Path("."))
    _add_common(p_sweep)

    p_phase = subs.add_parser("phase", help="Monte-Carlo phase transition CSV")
    p_phase.add_argument("--mode", choices=("finite", "unique"), default="finite")
    p_phase.add_argument("--n", type=int, required=True)
    p_phase.add_argument("--m1", type=int, required=True)
    p_phase.add_argument("--m2", type=int, required=True)
    p_phase.add_argument("--ranks", required=True)
    p_phase.add_argument("--l-values", default=None, help="comma list; default 0..n")
    p_phase.add_argument("--num-trials", type=int, default=100)
    p_phase.add_argument("--with-checker", action="store_true")
    _add_common(p_phase)

    p_build = subs.add_parser("build-constraint", help="dump the constraint matrix")
    p_build.add_argument("--pattern", type=Path, required=True)
    p_build.add_argument("--ranks", required=True)
    p_build.add_argument("--pivot-rule", choices=("smallest", "random"),
                         default="smallest")
    p_build.add_argument("--provenance-out", type=Path, default=None)
    _add_common(p_build)

    return parser


def _verdict_exit(status: Status) -> int:
    return EXIT_UNKNOWN if status == Status.UNKNOWN else EXIT_OK


def _run(args) -> int:
    if args.command == "check":
        pattern = load_pattern(args.pattern)
        ranks = _parse_ranks(args.ranks)
        verdict, _ = decide_finite(
            pattern, ranks, search=args.search, max_nodes=args.max_enum,
            strict_subsets=args.strict_subsets,
        )
        _emit(verdict.to_dict(), args)
        return _verdict_exit(verdict.status)

    if args.command == "unique":
        pattern = load_pattern(args.pattern)
        ranks = _parse_ranks(args.ranks)
        constraint = build_constraint(pattern, ranks)
        verdict = check_unique(
            constraint, ranks, pattern.shape, search=args.search,
            max_nodes=args.max_enum, strict_subsets=args.strict_subsets,
        )
        _emit(verdict.to_dict(), args)
        return _verdict_exit(verdict.status)

    if args.command == "oracle":
        pattern = load_pattern(args.pattern)
        ranks = _parse_ranks(args.ranks)
        report = finiteness_oracle(pattern, ranks, _oracle_config(args))
        _emit(report.to_dict(), args)
        return EXIT_OK

    if args.command == "bounds":
        ranks = _parse_ranks(args.ranks)
        report = bounds_mod.build_report(
            args.n, ranks, args.eps, m1=args.m1, m2=args.m2, base=args.log_base
        )
        _emit(report.to_dict(), args)
        return EXIT_OK

    if args.command == "canonicalize":
        import numpy as np

        ranks = _parse_ranks(args.ranks)
        V = np.loadtxt(args.basis, ndmin=2)
        C = canonicalize(V, ranks)
        text = "\n".join(" ".join(f"{v:.17g}" for v in row) for row in C) + "\n"
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK

    if args.command == "sweep":
        r_values = tuple(_parse_int_list(args.r_values))
        sweep = experiments.bound_comparison_sweep(
            n=args.n, m1=args.m1, m2=args.m2, eps=args.eps,
            r_values=r_values, base=args.log_base,
        )
        paths = experiments.write_sweep_csvs(sweep, args.out_dir)
        sys.stdout.write("\n".join(str(p) for p in paths) + "\n")
        return EXIT_OK

    if args.command == "phase":
        from .core import ProblemShape

        ranks = _parse_ranks(args.ranks)
        shape = ProblemShape(args.n, args.m1, args.m2)
        l_values = (
            _parse_int_list(args.l_values)
            if args.l_values
            else list(range(args.n + 1))
        )
        points, _ = experiments.phase_transition(
            shape, ranks, l_values, trials=args.num_trials, seed=args.seed,
            mode=args.mode, run_checker=args.with_checker,
            config=_oracle_config(args), max_nodes=args.max_enum,
        )
        out = args.out or Path(f"phase_{args.mode}.csv")
        experiments.write_phase_csv(points, out)
        sys.stdout.write(str(out) + "\n")
        return EXIT_OK

    if args.command == "build-constraint":
        pattern = load_pattern(args.pattern)
        ranks = _parse_ranks(args.ranks)
        matrix = build_constraint(
            pattern, ranks, pivot_rule=args.pivot_rule, seed=args.seed
        )
        text = dump_dense(matrix)
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        if args.provenance_out:
            Path(args.provenance_out).write_text(dump_provenance(matrix))
        return EXIT_OK

    raise AssertionError(f"unhandled command {args.command!r}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except (
        PatternFormatError,
        InvalidRankError,
        InsufficientSamplesError,
        DegenerateRandomPointError,
        OSError,
        ValueError,
    ) as exc:
        error = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        sys.stderr.write(json.dumps(error) + "\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
