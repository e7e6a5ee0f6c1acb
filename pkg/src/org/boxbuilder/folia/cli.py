"""
Command-line entry point: ``folia <command> [options] [files]``.

Exit codes: 0 ok, 1 verdict false, 2 input error, 3 budget exhausted,
4 ambient constraint violated. Logs go to stderr, the report to stdout or --out.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from pydantic import BaseModel, ValidationError

from org.boxbuilder.folia import commands  # noqa: F401  registers the commands
from org.boxbuilder.folia import report as report_io
from org.boxbuilder.folia.command_registry import REGISTRY
from org.boxbuilder.folia.config import budget_from_env, coefficient_bound_from_env, load_environment
from org.boxbuilder.folia.errors import FoliaError
from org.boxbuilder.folia.models.job_config import JobConfig
from org.boxbuilder.folia.models.report import Report
from org.boxbuilder.folia.serialization import dump_model

_LOG = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERDICT_FALSE = 1
EXIT_INPUT = 2

LOG_LEVELS = [logging.WARNING, logging.INFO, logging.DEBUG]


def _weights(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Weights must be comma-separated integers, got {text!r}.")


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--seed", type=int, default=0, help="Seed of the named random generator.")
    shared.add_argument("--coef-bound", type=int, default=None, help="Bound on random integer coefficients.")
    shared.add_argument("--gb-pair-budget", type=int, default=None, help="Maximum number of reduced S-pairs.")
    shared.add_argument("--gb-degree-cap", type=int, default=None, help="Maximum degree of an S-pair lcm.")
    shared.add_argument("--format", choices=["json", "csv"], default="json", dest="output_format")
    shared.add_argument("--out", type=Path, default=None, help="Write the output here instead of stdout.")
    shared.add_argument("--verbose", "-v", action="count", default=0)
    shared.add_argument("--timings", action="store_true", help="Include wall-clock timings in the output.")

    parser = argparse.ArgumentParser(prog="folia", description="Exact computations with codimension-one foliations.")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", parents=[shared], help="Validate a 1-form as a foliation.")
    check.add_argument("inputs", nargs=1, type=Path, metavar="FORM")

    pull = sub.add_parser("pullback", parents=[shared], help="Pull a form back along a map lift.")
    pull.add_argument("inputs", nargs=2, type=Path, metavar="FILE", help="MAP then FORM")

    tangent = sub.add_parser("tangent-dim", parents=[shared], help="Dimension of the first-order deformation space.")
    tangent.add_argument("inputs", nargs=1, type=Path, metavar="FORM")

    verify = sub.add_parser("verify-main", parents=[shared], help="Compare T_omega with pullback and unfolding directions.")
    verify.add_argument("inputs", nargs="*", type=Path, metavar="FILE", help="optional MAP and FORM")
    verify.add_argument("--n", type=int)
    verify.add_argument("--m", type=int)
    verify.add_argument("--weights", type=_weights)
    verify.add_argument("--delta", type=int)
    verify.add_argument("--k", type=int, default=1)

    good = sub.add_parser("good-degrees", parents=[shared], help="Admissible degrees on a weighted plane.")
    good.add_argument("--weights", type=_weights, required=True)
    good.add_argument("--min", type=int)
    good.add_argument("--max", type=int, required=True)

    census = sub.add_parser("census", parents=[shared], help="Component table rows for P^n.")
    census.add_argument("--n", type=int, required=True)
    census.add_argument("--k", type=int, default=1)
    census.add_argument("--family")
    census.add_argument("--weights", type=_weights)
    census.add_argument("--delta", type=int)
    census.add_argument("--m", type=int)

    kupka = sub.add_parser("kupka", parents=[shared], help="Kupka report of a 1-form.")
    kupka.add_argument("inputs", nargs=1, type=Path, metavar="FORM")
    return parser


COMMAND_PARAMS = ("n", "m", "weights", "delta", "k", "min", "max", "family")


def job_from_args(args: argparse.Namespace) -> JobConfig:
    params = {name: getattr(args, name) for name in COMMAND_PARAMS if getattr(args, name, None) is not None}
    return JobConfig(
        command=args.command,
        inputs=list(getattr(args, "inputs", None) or []),
        seed=args.seed,
        coefficient_bound=coefficient_bound_from_env(args.coef_bound),
        budget=budget_from_env(max_pairs=args.gb_pair_budget, max_degree=args.gb_degree_cap),
        output_format=args.output_format,
        verbosity=args.verbose,
        include_timings=args.timings,
        params=params,
    )


def execute(job: JobConfig) -> Tuple[int, bytes]:
    """
    Runs one job and returns (exit code, output bytes). Library errors are
    not caught here.
    """
    function = REGISTRY.get(job.command)
    if function is None:
        raise ValueError(f"Command {job.command!r} not found in registry.")
    _LOG.info(f"Running {job.command} with seed {job.seed}")
    result = function(job)
    if isinstance(result, Report):
        code = EXIT_OK if result.passed else EXIT_VERDICT_FALSE
        return code, report_io.emit(result, job.output_format, job.include_timings)
    if isinstance(result, BaseModel):
        return EXIT_OK, dump_model(result)
    raise TypeError(f"Command {job.command!r} returned {type(result).__name__}.")


def _write(data: bytes, out: Optional[Path]):
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        out.write_bytes(data)


def main(argv: Optional[List[str]] = None) -> int:
    load_environment()
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=LOG_LEVELS[min(args.verbose, len(LOG_LEVELS) - 1)],
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        job = job_from_args(args)
        code, data = execute(job)
    except FoliaError as e:
        _LOG.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except (ValidationError, ValueError) as e:
        _LOG.error(f"Invalid input: {e}")
        return EXIT_INPUT
    _write(data, args.out)
    _LOG.info(f"{job.command} finished with exit code {code}")
    return code


def run():
    raise SystemExit(main())


if __name__ == "__main__":
    run()
