"""``mas-align`` command line: align, verify, bench.

Exit codes: 0 success, 1 IO/engine failure, 2 usage/validation, 3 verification mismatch.
"""

from __future__ import annotations

import argparse
import sys

from .bench import BenchPlan, emit_report, run_bench
from .core import DEFAULT_MAX_NEG_VAL, Engine, LanePadding, LikelihoodBatch, MasConfig, MasError, ValidationError
from .engines import ALIGNERS
from .io import IoFailure, read_tensor, write_tensor
from .verify import run_verification

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2, 3
VERIFY_T_MAX, VERIFY_S_MAX = 6, 10


def _bounded_int(lo: int, hi: int | None = None):
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if v < lo or (hi is not None and v > hi):
            raise argparse.ArgumentTypeError(f"{v} outside [{lo}, {hi if hi is not None else 'inf'}]")
        return v

    return parse


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("values must be positive integers")
    return values


def _engine_list(text: str) -> list[Engine]:
    try:
        return [Engine(x.strip()) for x in text.split(",") if x.strip()]
    except ValueError:
        choices = ", ".join(e.value for e in Engine)
        raise argparse.ArgumentTypeError(f"unknown engine in {text!r} (choose from {choices})") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mas-align", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("align", help="align a likelihood tensor file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--engine", choices=[e.value for e in Engine], default=Engine.PARALLEL.value)
    p.add_argument("--neg-val", type=float, default=DEFAULT_MAX_NEG_VAL)
    p.add_argument("--threads", type=_bounded_int(1))
    p.add_argument("--lane-padding", choices=[x.value for x in LanePadding], default=LanePadding.NONE.value)

    p = sub.add_parser("verify", help="check both engines against the brute-force oracle")
    p.add_argument("--trials", type=_bounded_int(1), default=1000)
    p.add_argument("--t-max", type=_bounded_int(1, VERIFY_T_MAX), default=VERIFY_T_MAX)
    p.add_argument("--s-max", type=_bounded_int(1, VERIFY_S_MAX), default=VERIFY_S_MAX)
    p.add_argument("--seed", type=_bounded_int(0), default=0)

    p = sub.add_parser("bench", help="time the engines over a T sweep")
    p.add_argument("--t-values", type=_int_list, default=BenchPlan().t_values)
    p.add_argument("--batch-size", type=_bounded_int(1), default=32)
    p.add_argument("--s-ratio", type=_bounded_int(1), default=4)
    p.add_argument("--repeats", type=_bounded_int(1), default=20)
    p.add_argument("--warmup", type=_bounded_int(0), default=3)
    p.add_argument("--engines", type=_engine_list, default=[Engine.REFERENCE, Engine.PARALLEL])
    p.add_argument("--seed", type=_bounded_int(0), default=0)
    p.add_argument("--threads", type=_bounded_int(1))
    p.add_argument("--format", choices=["csv", "markdown"], default="csv")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    return parser


def cmd_align(args, aligners=None) -> int:
    aligners = aligners or ALIGNERS
    try:
        cfg = MasConfig(engine=args.engine, max_neg_val=args.neg_val, lane_padding=args.lane_padding, threads=args.threads)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        batch = read_tensor(args.input)
    except ValidationError as e:
        print(f"error: invalid input: {e}", file=sys.stderr)
        return EXIT_USAGE
    except IoFailure as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    if not isinstance(batch, LikelihoodBatch):
        print(f"error: {args.input} holds an alignment, not likelihoods", file=sys.stderr)
        return EXIT_USAGE
    try:
        alignment = aligners[cfg.engine](batch, cfg)
        write_tensor(args.output, alignment)
    except MasError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_verify(args, aligners=None) -> int:
    if args.s_max < args.t_max:
        print(f"error: --s-max ({args.s_max}) must be >= --t-max ({args.t_max})", file=sys.stderr)
        return EXIT_USAGE
    result = run_verification(args.trials, args.t_max, args.s_max, args.seed, aligners=aligners)
    bad = {m.seed for m in result.mismatches}
    for m in result.mismatches:
        print(f"MISMATCH seed={m.seed} t={m.t} s={m.s}: {m.reason}", file=sys.stderr)
    print(f"trials={result.trials} passed={result.trials - len(bad)} failed={len(bad)}")
    return EXIT_OK if result.ok else EXIT_MISMATCH


def cmd_bench(args, aligners=None) -> int:
    try:
        plan = BenchPlan(
            t_values=args.t_values,
            batch_size=args.batch_size,
            s_ratio=args.s_ratio,
            repeats=args.repeats,
            warmup=args.warmup,
            engines=args.engines,
            seed=args.seed,
            config=MasConfig(threads=args.threads),
        )
        text = emit_report(run_bench(plan, aligners=aligners, log=sys.stderr), args.format)
    except MasError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    if args.out == "-":
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(args.out, "w") as f:
            f.write(text)
    except OSError as e:
        print(f"error: cannot write {args.out}: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


COMMANDS = {"align": cmd_align, "verify": cmd_verify, "bench": cmd_bench}


def main(argv=None, aligners=None) -> int:
    """Entry point; ``aligners`` replaces the engine table (tests inject faulty engines)."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    return COMMANDS[args.command](args, aligners=aligners)


if __name__ == "__main__":
    sys.exit(main())
