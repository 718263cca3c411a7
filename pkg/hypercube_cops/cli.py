"""Command line entry point: ``hypercube-cops <command> ...``.

Exit codes: 0 on success, 2 on an invalid configuration, 3 when the exact
search ran out of budget.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import (
    Callable,
    Dict,
    Optional,
    Sequence,
)

from pydantic import ValidationError

from hypercube_cops.bounds import DEFAULT_SWITCH_OFFSET, P_TERMS, bound_report
from hypercube_cops.diagnostics import diagnose
from hypercube_cops.montecarlo import (
    TrialConfig,
    estimate_win_probability,
    rows_to_csv,
    sweep_cop_counts,
    transcripts,
)
from hypercube_cops.solver import SolverBudget, cop_number_exact
from hypercube_cops.utils import BudgetExceeded, InvalidConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3
DEFAULT_TRANSCRIPT_LIMIT = 100
TIMED_SOLVE_MAX_N = 7


def _write(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _trial_config(args: argparse.Namespace, cop_count: int) -> TrialConfig:
    return TrialConfig(
        n=args.n,
        cop_count=cop_count,
        cop_strategy=args.cop,
        robber_strategy=args.robber,
        trials=args.trials,
        seed=args.seed,
        switch_offset=args.t,
    )


def run_bounds(args: argparse.Namespace) -> int:
    report = bound_report(args.n, args.c, args.terms, args.t or DEFAULT_SWITCH_OFFSET)
    if args.json:
        _write(report.model_dump_json(indent=2))
        return EXIT_OK

    rows = {
        "n": report.n,
        "parity": report.parity,
        "lower bound": f"{report.lower} (>= {report.lower_ceiling} cops)",
        "covering bound": report.trivial_upper,
        "survival product": report.survival,
        "inflated product": report.inflated_survival
        if report.inflated_survival is not None
        else f"degenerate at factor {report.degenerate_factor}",
        "constant c": f"{report.constant:.6f}",
        "recommended cops": report.recommended,
        "P estimate": f"{report.p_constant_estimate:.9f} ({report.p_terms} terms)",
        "target family": report.target_family,
        "strike family": report.strike_family,
    }
    width = max(len(name) for name in rows)
    _write("\n".join(f"{name:<{width}}  {value}" for name, value in rows.items()))
    return EXIT_OK


def run_solve(args: argparse.Namespace) -> int:
    timed = args.budget_seconds is not None
    budget = SolverBudget(
        max_n=TIMED_SOLVE_MAX_N if timed else SolverBudget().max_n,
        seconds=args.budget_seconds,
        max_nodes=args.max_nodes,
        symmetry=not args.no_symmetry,
    )
    result = cop_number_exact(args.n, args.max_cops, budget)
    _write(result.model_dump_json(indent=2))
    if result.solved:
        return EXIT_OK
    return EXIT_BUDGET if result.unknown_from is not None else EXIT_OK


def run_simulate(args: argparse.Namespace) -> int:
    cfg = _trial_config(args, args.cops)
    result = estimate_win_probability(cfg, args.workers)
    _write(result.model_dump_json(indent=2))

    if args.csv:
        Path(args.csv).write_text(rows_to_csv([result]), encoding="utf-8")
    if args.transcripts:
        with Path(args.transcripts).open("w", encoding="utf-8") as stream:
            for transcript in transcripts(cfg, args.transcript_limit):
                stream.write(transcript.dumps())
    return EXIT_OK


def run_sweep(args: argparse.Namespace) -> int:
    cfg = _trial_config(args, args.c_from)
    sweep = sweep_cop_counts(cfg, args.c_from, args.c_to, args.step, args.workers)
    for threshold in sweep.thresholds:
        logger.info(
            "Least C with p_hat >= %s: %s (CI %s..%s)",
            threshold.level,
            threshold.cop_count,
            threshold.ci_low,
            threshold.ci_high,
        )

    if args.csv:
        Path(args.csv).write_text(sweep.to_csv(), encoding="utf-8")
        _write(sweep.model_dump_json(include={"thresholds"}))
    else:
        _write(sweep.to_csv())
    return EXIT_OK


def run_diagnose(args: argparse.Namespace) -> int:
    report = diagnose(_trial_config(args, args.cops), args.workers)
    _write(report.model_dump_json(indent=2))
    return EXIT_OK


def _add_trial_arguments(parser: argparse.ArgumentParser, cop: str, robber: str) -> None:
    parser.add_argument("--cop", default=cop, help="cop strategy, e.g. uniform, chain, paper:t=7, cover")
    parser.add_argument("--robber", default=robber, help="robber strategy: greedy, random, lookahead[:expectimax]")
    parser.add_argument("--trials", type=int, required=True)
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--t", type=int, default=None, help="switch offset of the paper cop strategy")
    parser.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypercube-cops")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    commands = parser.add_subparsers(dest="command", required=True)

    bounds = commands.add_parser("bounds", help="closed-form bounds for one n")
    bounds.add_argument("--n", type=int, required=True)
    bounds.add_argument("--json", action="store_true")
    bounds.add_argument("--c", type=float, default=None, help="override the theorem constant")
    bounds.add_argument("--terms", type=int, default=P_TERMS)
    bounds.add_argument("--t", type=int, default=None)

    solve = commands.add_parser("solve", help="exact cop number for small n")
    solve.add_argument("--n", type=int, required=True)
    solve.add_argument("--max-cops", type=int, default=None)
    solve.add_argument(
        "--budget-seconds", type=float, default=None, help=f"time budget; required above n=6, up to n={TIMED_SOLVE_MAX_N}"
    )
    solve.add_argument("--max-nodes", type=int, default=SolverBudget().max_nodes)
    solve.add_argument("--no-symmetry", action="store_true")

    simulate = commands.add_parser("simulate", help="estimate the cops' win probability")
    simulate.add_argument("--n", type=int, required=True)
    simulate.add_argument("--cops", type=int, required=True)
    _add_trial_arguments(simulate, "paper", "greedy")
    simulate.add_argument("--csv", default=None)
    simulate.add_argument("--transcripts", default=None)
    simulate.add_argument("--transcript-limit", type=int, default=DEFAULT_TRANSCRIPT_LIMIT)

    sweep = commands.add_parser("sweep", help="estimates over a range of cop counts")
    sweep.add_argument("--n", type=int, required=True)
    sweep.add_argument("--from", dest="c_from", type=int, required=True)
    sweep.add_argument("--to", dest="c_to", type=int, required=True)
    sweep.add_argument("--step", type=int, default=1)
    _add_trial_arguments(sweep, "paper", "greedy")
    sweep.add_argument("--csv", default=None)

    diagnostics = commands.add_parser("diagnose", help="bad-event frequencies of a randomized cop strategy")
    diagnostics.add_argument("--n", type=int, required=True)
    diagnostics.add_argument("--cops", type=int, required=True)
    _add_trial_arguments(diagnostics, "paper", "greedy")

    return parser


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "bounds": run_bounds,
    "solve": run_solve,
    "simulate": run_simulate,
    "sweep": run_sweep,
    "diagnose": run_diagnose,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        return COMMANDS[args.command](args)
    except (InvalidConfig, ValidationError) as exc:
        logger.error("Invalid configuration: %s", exc)  # noqa: TRY400
        return EXIT_INVALID
    except BudgetExceeded as exc:
        logger.error("Budget exhausted: %s", exc)  # noqa: TRY400
        return EXIT_BUDGET
