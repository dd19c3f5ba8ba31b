"""Command-line front end.

One subcommand per operation, structured CSV / JSON-lines output, explicit
deterministic seeding.  Exit codes: 0 success, 1 bad input (including flag
errors), 2 internal failure (including sink write errors).  Data goes to
stdout or --output; progress and diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from . import analysis, core, divpoor, export, stochastic
from .stochastic import DEFAULT_RNG_SEED

#: Seed-space bounds above this need --long-run (the census/survey cost
#: grows with the fourth power of bound//2).
LONG_RUN_BOUND = 32


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage errors on stderr with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        parts = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ValueError(f"expected comma-separated integers, got {text!r}") from None
    return parts


def _parse_cap(text: str) -> Optional[int]:
    if text.lower() == "none":
        return None
    return int(text)


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv", help="output format")
    p.add_argument("--output", metavar="PATH", default=None, help="write to PATH instead of stdout")


def _add_progress_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--progress", action="store_true", help="report progress on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tetrafree", description="2-free Tetranacci sequence laboratory")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="generate terms from a seed window")
    p.add_argument("--seed", required=True, type=_parse_ints, metavar="A,B,C,D")
    p.add_argument("--terms", required=True, type=int, help="number of terms to generate")
    _add_output_flags(p)

    p = sub.add_parser("classify", help="periodic-or-unresolved classification of one seed")
    p.add_argument("--seed", required=True, type=_parse_ints, metavar="A,B,C,D")
    p.add_argument("--max-steps", required=True, type=int)
    p.add_argument("--value-cap", type=_parse_cap, default=analysis.DEFAULT_VALUE_CAP,
                   metavar="N|none", help="stop when a term exceeds N (default 10^100)")
    p.add_argument("--mode", choices=("hash", "brent"), default="hash")
    _add_output_flags(p)

    p = sub.add_parser("search", help="cycle census over all odd seed windows below a bound")
    p.add_argument("--bound", required=True, type=int)
    p.add_argument("--max-steps", required=True, type=int)
    p.add_argument("--value-cap", type=_parse_cap, default=analysis.DEFAULT_VALUE_CAP, metavar="N|none")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--mode", choices=("hash", "brent"), default="brent")
    p.add_argument("--long-run", action="store_true",
                   help=f"confirm a search with bound > {LONG_RUN_BOUND}")
    _add_progress_flag(p)
    _add_output_flags(p)

    p = sub.add_parser("drift", help="exact mean drift around a cycle")
    p.add_argument("--cycle", required=True, type=_parse_ints, metavar="A,B,...")
    _add_output_flags(p)

    p = sub.add_parser("alpha", help="bracket the quartic growth constant")
    p.add_argument("--tolerance", default="1e-16", help="bracket width, e.g. 1e-16 or 1/100000")
    p.add_argument("--digits", type=int, default=None, help="decimal places to certify")
    _add_output_flags(p)

    p = sub.add_parser("cf", help="certified continued-fraction expansion of the growth constant")
    p.add_argument("--terms", required=True, type=int, help="number of partial quotients")
    _add_output_flags(p)

    p = sub.add_parser("divpoor", help="division-poor constructions")
    dsub = p.add_subparsers(dest="divpoor_command", required=True, parser_class=_Parser)

    d = dsub.add_parser("construct", help="backward-recursion construction for a ratio r")
    d.add_argument("--r", required=True, help="rational ratio > 1, e.g. 217560407/161271201")
    d.add_argument("--max-steps", type=int, default=1_000_000)
    d.add_argument("--terms-only", action="store_true",
                   help="emit one (index, term) row per segment term instead of the summary record")
    _add_output_flags(d)

    d = dsub.add_parser("measure", help="length of the initial exponent-1 run from a seed")
    d.add_argument("--seed", required=True, type=_parse_ints, metavar="A,B,C,D")
    d.add_argument("--max-steps", type=int, default=1_000_000)
    _add_output_flags(d)

    d = dsub.add_parser("predict", help="heuristic run-length bound for a denominator q")
    d.add_argument("--q", required=True, type=int)
    _add_output_flags(d)

    p = sub.add_parser("simulate", help="run the stochastic division model")
    p.add_argument("--start", required=True, type=_parse_ints, metavar="A,B,C,D")
    p.add_argument("--steps", required=True, type=int)
    p.add_argument("--rng-seed", type=int, default=DEFAULT_RNG_SEED,
                   help=f"SplitMix64 seed (default {DEFAULT_RNG_SEED})")
    p.add_argument("--track", choices=("log", "exact"), default="log")
    p.add_argument("--dump", action="store_true",
                   help="emit one row per trajectory value instead of the summary record")
    _add_output_flags(p)

    p = sub.add_parser("survey", help="exhaustive surveys over real sequences")
    ssub = p.add_subparsers(dest="survey_command", required=True, parser_class=_Parser)

    s = ssub.add_parser("residues", help="histogram of term residues modulo a power of two")
    s.add_argument("--bound", required=True, type=int)
    s.add_argument("--terms", required=True, type=int, help="terms counted per seed")
    s.add_argument("--modulus", required=True, type=int)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--include-seeds", action="store_true",
                   help="count the four seed terms among the first --terms terms")
    s.add_argument("--long-run", action="store_true",
                   help=f"confirm a survey with bound > {LONG_RUN_BOUND}")
    _add_progress_flag(s)
    _add_output_flags(s)

    s = ssub.add_parser("exponents", help="histogram of division exponents")
    s.add_argument("--bound", required=True, type=int)
    s.add_argument("--terms", required=True, type=int, help="steps counted per seed")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--long-run", action="store_true",
                   help=f"confirm a survey with bound > {LONG_RUN_BOUND}")
    _add_progress_flag(s)
    _add_output_flags(s)

    return parser


def _emit(fieldnames, records, args) -> None:
    text = export.render(fieldnames, records, args.format)
    if args.output is None:
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="ascii", newline="") as fh:
            fh.write(text)


def _progress_callback(args):
    if not getattr(args, "progress", False):
        return None

    def report(done: int, total: int) -> None:
        print(f"\rprocessed {done}/{total} seeds", end="" if done < total else "\n", file=sys.stderr)

    return report


def _check_long_run(args) -> None:
    if args.bound > LONG_RUN_BOUND and not args.long_run:
        raise ValueError(
            f"bound {args.bound} enumerates {(args.bound // 2) ** 4} seeds; "
            f"pass --long-run to confirm"
        )


def _dispatch(args) -> None:
    cmd = args.command
    if cmd == "generate":
        rec = core.generate(args.seed, args.terms)
        _emit(export.GENERATE_FIELDS, export.generate_records(rec.terms, rec.exponents), args)
    elif cmd == "classify":
        res = analysis.classify(args.seed, args.max_steps, args.value_cap, args.mode)
        _emit(export.CLASSIFY_FIELDS, export.classify_records(args.seed, res), args)
    elif cmd == "search":
        _check_long_run(args)
        census = analysis.period_search(
            args.bound, args.max_steps, args.value_cap,
            workers=args.workers, mode=args.mode, progress=_progress_callback(args),
        )
        print(
            f"census: {census.seed_count} seeds, {len(census.cycles)} cycles, "
            f"{census.unresolved_seeds} unresolved",
            file=sys.stderr,
        )
        _emit(export.CENSUS_FIELDS, export.census_records(census), args)
    elif cmd == "drift":
        value = analysis.cycle_drift(args.cycle)
        _emit(export.DRIFT_FIELDS, export.drift_records(tuple(args.cycle), value), args)
    elif cmd == "alpha":
        approx = divpoor.isolate_alpha(args.tolerance, args.digits)
        _emit(export.ALPHA_FIELDS, export.alpha_records(approx), args)
    elif cmd == "cf":
        cf = divpoor.continued_fraction_of_alpha(args.terms)
        _emit(export.CF_FIELDS, export.cf_records(cf), args)
    elif cmd == "divpoor":
        if args.divpoor_command == "construct":
            res = divpoor.construct(args.r, args.max_steps)
            if args.terms_only:
                _emit(export.SEGMENT_FIELDS, export.segment_records(res), args)
            else:
                _emit(export.CONSTRUCT_FIELDS, export.construct_records(res), args)
        elif args.divpoor_command == "measure":
            steps = divpoor.measure_division_poor(args.seed, args.max_steps)
            _emit(export.MEASURE_FIELDS, export.measure_records(args.seed, steps), args)
        else:
            pred = divpoor.predict_length(args.q)
            _emit(export.PREDICT_FIELDS, export.predict_records(pred), args)
    elif cmd == "simulate":
        traj = stochastic.simulate_model(args.start, args.steps, args.rng_seed, args.track)
        if args.dump:
            _emit(export.TRAJECTORY_FIELDS, export.trajectory_records(traj), args)
        else:
            _emit(export.SIMULATE_FIELDS, export.simulate_records(traj), args)
    else:  # survey
        _check_long_run(args)
        if args.survey_command == "residues":
            hist = stochastic.residue_survey(
                args.bound, args.terms, args.modulus,
                workers=args.workers, include_seeds=args.include_seeds,
                progress=_progress_callback(args),
            )
        else:
            hist = stochastic.exponent_survey(
                args.bound, args.terms, workers=args.workers, progress=_progress_callback(args),
            )
        _emit(export.HISTOGRAM_FIELDS, export.histogram_records(hist), args)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        _dispatch(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # sink failures and genuine bugs
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
