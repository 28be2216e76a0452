"""
Command-line surface (`snell`, also `python -m src`).

Machine output goes to standard out; diagnostics and logs go to standard
error. Exit codes: 0 success, 1 property violation, 2 invalid input,
3 budget exceeded.
"""

import functools
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Optional

import click
import pandas as pd
from dotenv import load_dotenv

from src.core.config import settings
from src.core.shared.exceptions import AppBaseException
from src.engine.stopping_times import StoppingTime
from src.models.instance import Instance
from src.services.fuzz import run_fuzz
from src.services.instances import (
    GeneratorParams,
    canonical,
    dumps,
    generate_random,
    load,
    parse_stopping_time,
    save,
)
from src.services.propcheck import run_suite
from src.services.reports.decomposition import DecompositionService
from src.services.reports.enumeration import EnumerationService
from src.services.reports.solve import SERIES, SolveService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_BUDGET = 3


def _emit_json(data: Any) -> None:
    click.echo(json.dumps(data, indent=2))


def handle_errors(command: Callable) -> Callable:
    """Render application errors on stderr and exit with their exit code."""

    @functools.wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except AppBaseException as e:
            logger.debug("command failed", exc_info=True)
            click.echo(f"error: {e.detail}", err=True)
            click.echo(json.dumps(e.to_dict(), indent=2), err=True)
            sys.exit(e.exit_code)

    return wrapper


def _start_time(
    instance: Instance, at: Optional[str], at_map: Optional[Path]
) -> Optional[StoppingTime]:
    if at is not None and at_map is not None:
        raise click.UsageError("use either --at or --at-map, not both")
    if at_map is not None:
        return parse_stopping_time(at_map.read_text(encoding="utf-8"), instance)
    if at is not None:
        return parse_stopping_time(at, instance)
    return None


def _format_option(choices: list, default: str) -> Callable:
    return click.option(
        "--format",
        "fmt",
        type=click.Choice(choices),
        default=default,
        show_default=True,
    )


def _generator_options(command: Callable) -> Callable:
    """--max-outcomes, --horizon, --qlc-prob and --reward-max."""
    options = (
        click.option(
            "--max-outcomes", type=click.IntRange(min=1), default=4, show_default=True
        ),
        click.option(
            "--horizon", type=click.IntRange(min=0), default=2, show_default=True
        ),
        click.option(
            "--qlc-prob",
            type=click.FloatRange(0, 1),
            default=0.5,
            show_default=True,
            help="Chance that a pre-partition is coarser than its post-partition.",
        ),
        click.option(
            "--reward-max", type=click.IntRange(min=0), default=10, show_default=True
        ),
    )
    for option in reversed(options):
        command = option(command)
    return command


def _params(
    max_outcomes: int, horizon: int, qlc_prob: float, reward_max: int
) -> GeneratorParams:
    return GeneratorParams(
        max_outcomes=max_outcomes,
        horizon=horizon,
        qlc_violation_prob=qlc_prob,
        reward_max=reward_max,
    )


instance_file = click.argument(
    "file", type=click.Path(exists=True, dir_okay=False, path_type=Path)
)
budget_option = click.option(
    "--budget",
    type=click.IntRange(min=1),
    default=None,
    help="Cap on enumerated predictable times (default: SNELL_BUDGET).",
)
out_file_option = click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Output file (default: standard out).",
)


@click.group()
@click.option(
    "--log-level", default=None, help="Logging level (default: SNELL_LOG_LEVEL)."
)
def cli(log_level: Optional[str]) -> None:
    """Exact optimal stopping over predictable times on finite models."""
    load_dotenv()
    logging.basicConfig(
        level=(log_level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


@cli.command()
@instance_file
@click.option(
    "--at", default=None, help="Start time S: an integer or a JSON map outcome -> time."
)
@click.option(
    "--at-map",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="File holding S as a JSON map outcome -> time.",
)
@_format_option(["table", "json", "csv"], "table")
@click.option(
    "--series",
    type=click.Choice(list(SERIES)),
    default="V",
    show_default=True,
    help="Series written by --format csv.",
)
@budget_option
@handle_errors
def solve(
    file: Path,
    at: Optional[str],
    at_map: Optional[Path],
    fmt: str,
    series: str,
    budget: Optional[int],
) -> None:
    """Value V, strict value V+, first contact time, optimal value and optimal times."""
    instance = load(file)
    service = SolveService(instance, budget or settings.BUDGET)
    start = _start_time(instance, at, at_map)
    if fmt == "json":
        _emit_json(service.generate_report(start))
    elif fmt == "csv":
        click.echo(service.render_csv(series), nl=False)
    else:
        click.echo(service.render_table(start), nl=False)


@cli.command()
@instance_file
@click.option(
    "--props", default=None, help="Comma-separated property ids (default: all)."
)
@budget_option
@click.option(
    "--check-budget",
    type=click.IntRange(min=1),
    default=None,
    help="Cap on evaluations per property (default: SNELL_CHECK_BUDGET).",
)
@click.option(
    "--strict-budget",
    is_flag=True,
    help="Exit 3 when any property is skipped for budget.",
)
@click.option(
    "--sample-limit",
    type=click.IntRange(min=1),
    default=None,
    help="Check seeded subsets of at most this many times; results are marked partial.",
)
@_format_option(["json", "table"], "json")
@handle_errors
def verify(
    file: Path,
    props: Optional[str],
    budget: Optional[int],
    check_budget: Optional[int],
    strict_budget: bool,
    sample_limit: Optional[int],
    fmt: str,
) -> None:
    """Run the property suite; exit 1 when a property fails."""
    instance = load(file)
    ids = [p.strip() for p in props.split(",") if p.strip()] if props else None
    report = run_suite(
        instance,
        budget=budget or settings.BUDGET,
        check_budget=check_budget or settings.CHECK_BUDGET,
        props=ids,
        sample_limit=sample_limit,
    )
    if fmt == "json":
        _emit_json(report.to_dict())
    else:
        rows = [
            {"id": r.id, "status": r.status.value, "partial": r.partial}
            for r in report.results
        ]
        frame = pd.DataFrame(rows, columns=["id", "status", "partial"])
        click.echo(frame.to_string(index=False))
    for result in report.failed:
        note = result.witness.get("note", "")
        click.echo(f"property {result.id} failed: {note}", err=True)
    if report.failed:
        sys.exit(EXIT_VIOLATION)
    if strict_budget and report.skipped:
        click.echo(f"{len(report.skipped)} propert(ies) skipped for budget", err=True)
        sys.exit(EXIT_BUDGET)


@cli.command()
@click.option("--seeds", type=click.IntRange(min=1), default=100, show_default=True)
@click.option(
    "--start-seed", type=click.IntRange(min=0), default=0, show_default=True
)
@_generator_options
@click.option(
    "--out",
    "out_dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Directory for failing instances and witnesses.",
)
@click.option(
    "--workers",
    type=click.IntRange(min=0),
    default=None,
    help="Worker processes, 0 = one per CPU (default: SNELL_FUZZ_WORKERS).",
)
@budget_option
@click.option("--check-budget", type=click.IntRange(min=1), default=None)
@click.option(
    "--strict-budget",
    is_flag=True,
    help="Exit 3 when any seed skipped a property for budget.",
)
@handle_errors
def fuzz(
    seeds: int,
    start_seed: int,
    max_outcomes: int,
    horizon: int,
    qlc_prob: float,
    reward_max: int,
    out_dir: Optional[Path],
    workers: Optional[int],
    budget: Optional[int],
    check_budget: Optional[int],
    strict_budget: bool,
) -> None:
    """Run the suite on random instances; failing seeds are written to --out."""
    summary = run_fuzz(
        seeds,
        _params(max_outcomes, horizon, qlc_prob, reward_max),
        start_seed=start_seed,
        budget=budget or settings.BUDGET,
        check_budget=check_budget or settings.CHECK_BUDGET,
        workers=settings.FUZZ_WORKERS if workers is None else workers,
        out_dir=out_dir,
    )
    _emit_json(summary.to_dict())
    if not summary.ok:
        sys.exit(EXIT_VIOLATION)
    if strict_budget and summary.skipped:
        sys.exit(EXIT_BUDGET)


@cli.command()
@instance_file
@click.option("--at", default=None, help="Start time S for the flat-before checks.")
@_format_option(["table", "json", "csv"], "table")
@click.option(
    "--series",
    type=click.Choice(["V", "M", "A", "C", "dC"]),
    default="M",
    show_default=True,
    help="Series written by --format csv.",
)
@handle_errors
def decompose(file: Path, at: Optional[str], fmt: str, series: str) -> None:
    """Mertens decomposition tables M, A, C."""
    instance = load(file)
    service = DecompositionService(instance)
    if fmt == "json":
        _emit_json(service.generate_report(_start_time(instance, at, None)))
    elif fmt == "csv":
        click.echo(service.render_csv(series), nl=False)
    else:
        click.echo(service.render_table(), nl=False)


@cli.command(name="enumerate")
@instance_file
@click.option(
    "--from",
    "start",
    default="0",
    show_default=True,
    help="Lower bound S: integer or JSON map.",
)
@click.option(
    "--strict", is_flag=True, help="Times strictly after S (S itself where S = N)."
)
@_format_option(["json", "table", "csv"], "json")
@budget_option
@handle_errors
def enumerate_command(
    file: Path, start: str, strict: bool, fmt: str, budget: Optional[int]
) -> None:
    """List the predictable stopping times above S with E[phi(tau)]."""
    instance = load(file)
    service = EnumerationService(instance, budget or settings.BUDGET)
    lower = parse_stopping_time(start, instance)
    if fmt == "json":
        _emit_json(service.generate_report(lower, strict))
    elif fmt == "csv":
        click.echo(service.render_csv(lower, strict), nl=False)
    else:
        click.echo(service.render_table(lower, strict), nl=False)


@cli.command()
@click.option("--seed", type=click.IntRange(min=0), required=True)
@_generator_options
@out_file_option
@handle_errors
def generate(
    seed: int,
    max_outcomes: int,
    horizon: int,
    qlc_prob: float,
    reward_max: int,
    out: Optional[Path],
) -> None:
    """Write a seeded random instance document."""
    params = _params(max_outcomes, horizon, qlc_prob, reward_max)
    instance = generate_random(seed, params)
    if out is None:
        click.echo(dumps(instance), nl=False)
    else:
        save(instance, out)


@cli.command(name="canonical")
@click.argument("name")
@out_file_option
@handle_errors
def canonical_command(name: str, out: Optional[Path]) -> None:
    """Write E1 (deterministic), E2 (preslot-coin) or E3 (gap)."""
    instance = canonical(name)
    if out is None:
        click.echo(dumps(instance), nl=False)
    else:
        save(instance, out)


if __name__ == "__main__":
    cli()
