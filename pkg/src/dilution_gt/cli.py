"""Command-line interface for dilution-gt."""

import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, NoReturn, Optional

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

from .channel import GroundTruth, simulate as simulate_outcomes, truth_stream
from .codes import DisjunctMatrix
from .config import Config, ConfigManager
from .decoder import dec_d_defect
from .errors import DilutionGTError, UsageError
from .formatter import read_outcomes, write_csv, write_matrix, write_outcomes
from .harness import (
    SWEEPS,
    ExperimentConfig,
    run_experiment,
)
from .measurement import MeasurementMatrix
from .plan import ChernoffParams, NoiseParams, TestPlan, build_plan

app = typer.Typer(
    name="dilution-gt",
    help="Non-adaptive group testing under the dilution type-2 noise model",
    rich_markup_mode="rich",
)
console = Console()
err_console = Console(stderr=True)

logger = logging.getLogger("dilution_gt")


def setup_logging(verbose: bool = False, debug: bool = False) -> None:
    level = logging.DEBUG if debug else logging.INFO if verbose else logging.WARNING
    logger.handlers.clear()
    logger.addHandler(RichHandler(console=err_console, show_path=False))
    logger.setLevel(level)


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log progress messages"),
    debug: bool = typer.Option(False, "--debug", help="Log everything"),
) -> None:
    """Plan, simulate and decode dilution type-2 group tests."""
    setup_logging(verbose, debug)


def fail(message: str) -> NoReturn:
    console.print(f"[red]{message}[/red]")
    raise typer.Exit(1)


def parse_items(text: Optional[str]) -> Optional[List[int]]:
    """``"3,7,11"`` -> ``[3, 7, 11]``."""
    if text is None:
        return None
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"defectives must be a comma list of integers, got {text!r}")


def make_plan(
    config: Config,
    n_items: Optional[int],
    d: int,
    delta: Optional[float] = None,
    theta0: Optional[float] = None,
    theta1: Optional[float] = None,
    lambda_: Optional[float] = None,
    xi: Optional[float] = None,
    case: Optional[int] = None,
    rs_n: Optional[int] = None,
    q: Optional[int] = None,
    n: Optional[int] = None,
    r: Optional[int] = None,
    c: Optional[int] = None,
) -> TestPlan:
    """Build a plan from command-line flags, falling back to the saved config."""
    noise = NoiseParams(
        config.theta0 if theta0 is None else theta0,
        config.theta1 if theta1 is None else theta1,
    )
    chernoff = ChernoffParams(
        config.lambda_ if lambda_ is None else lambda_,
        config.xi if xi is None else xi,
    )
    rs = None
    if q is not None or n is not None or r is not None:
        if None in (q, n, r):
            raise UsageError("--q, --n and --r must be given together")
        rs = (q, n, r)
    plan = build_plan(
        n_items,
        d,
        config.delta if delta is None else delta,
        noise,
        chernoff,
        rs=rs,  # type: ignore[arg-type]
        case=case,
        rs_n=rs_n,
    )
    if c is not None:
        if c < 1:
            raise UsageError(f"c must be positive, got {c}")
        plan = dataclasses.replace(plan, c=c)
    return plan


def print_json(payload: Dict[str, Any]) -> None:
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")


@app.command()
def plan(
    n_items: Optional[int] = typer.Option(None, "--n-items", "-N", help="Number of items (a power of 2)"),
    d: int = typer.Option(1, "--d", "-d", help="Maximum number of defectives"),
    delta: Optional[float] = typer.Option(None, "--delta", help="Allowed failure probability"),
    lambda_: Optional[float] = typer.Option(None, "--lambda", help="Chernoff slack in (0, 1)"),
    xi: Optional[float] = typer.Option(None, "--xi", help="Majority margin"),
    theta0: Optional[float] = typer.Option(None, "--theta0", help="False-positive probability"),
    theta1: Optional[float] = typer.Option(None, "--theta1", help="False-negative probability"),
    case: Optional[int] = typer.Option(None, "--case", help="Preset Reed-Solomon case 1-5"),
    rs_n: Optional[int] = typer.Option(None, "--rs-n", help="Block length within --case"),
    q: Optional[int] = typer.Option(None, "--q", help="Reed-Solomon alphabet size"),
    n: Optional[int] = typer.Option(None, "--n", help="Reed-Solomon block length"),
    r: Optional[int] = typer.Option(None, "--r", help="Reed-Solomon message length"),
) -> None:
    """Print every derived quantity of a test plan as JSON."""
    config = ConfigManager().load()
    try:
        test_plan = make_plan(
            config, n_items, d, delta, theta0, theta1, lambda_, xi, case, rs_n, q, n, r
        )
    except DilutionGTError as exc:
        fail(str(exc))
    print_json(test_plan.to_dict())


@app.command("verify-disjunct")
def verify_disjunct(
    q: int = typer.Option(..., "--q", help="Alphabet size, a power of 2"),
    n: int = typer.Option(..., "--n", help="Block length, at most q"),
    r: int = typer.Option(..., "--r", help="Message length, at most n"),
    d: Optional[int] = typer.Option(None, "--d", help="Disjunctness to check (default: the design's)"),
    emit: Optional[Path] = typer.Option(None, "--emit", help="Write the explicit matrix as 0/1 rows"),
    budget: Optional[int] = typer.Option(None, "--budget", help="Work budget for the check"),
) -> None:
    """Check the concatenated Reed-Solomon matrix for d-disjunctness."""
    config = ConfigManager().load()
    budget = config.verify_budget if budget is None else budget
    try:
        matrix = DisjunctMatrix.from_params(q, n, r)
        d = matrix.d_disjunct if d is None else d
        explicit = matrix.materialize(budget)
        if emit is not None:
            with open(emit, "w", encoding="utf-8") as handle:
                write_matrix(handle, explicit)
        ok = matrix.verify(d, budget)
    except DilutionGTError as exc:
        fail(str(exc))
    label = f"{matrix.h} x {matrix.n_items} matrix (q={q}, n={n}, r={r})"
    if not ok:
        fail(f"{label} is not {d}-disjunct")
    console.print(f"[green]{label} is {d}-disjunct[/green]")


@app.command("gen-matrix")
def gen_matrix(
    n_items: Optional[int] = typer.Option(None, "--n-items", "-N", help="Number of items"),
    d: int = typer.Option(1, "--d", "-d", help="Maximum number of defectives"),
    c: int = typer.Option(1, "--c", help="Repetitions per signature test"),
    case: Optional[int] = typer.Option(None, "--case", help="Preset Reed-Solomon case 1-5"),
    rs_n: Optional[int] = typer.Option(None, "--rs-n", help="Block length within --case"),
    q: Optional[int] = typer.Option(None, "--q", help="Reed-Solomon alphabet size"),
    n: Optional[int] = typer.Option(None, "--n", help="Reed-Solomon block length"),
    r: Optional[int] = typer.Option(None, "--r", help="Reed-Solomon message length"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Output file (default: stdout)"),
    budget: Optional[int] = typer.Option(None, "--budget", help="Maximum t x N entries"),
) -> None:
    """Write the explicit measurement matrix T as 0/1 text, one test per line."""
    config = ConfigManager().load()
    budget = config.matrix_budget if budget is None else budget
    try:
        test_plan = make_plan(config, n_items, d, case=case, rs_n=rs_n, q=q, n=n, r=r, c=c)
        explicit = MeasurementMatrix(test_plan).materialize(budget)
    except DilutionGTError as exc:
        fail(str(exc))
    if output is None:
        write_matrix(sys.stdout, explicit)
        return
    with open(output, "w", encoding="utf-8") as handle:
        rows = write_matrix(handle, explicit)
    console.print(f"[green]Wrote {rows} x {test_plan.n_items} matrix[/green] {output}")


@app.command()
def simulate(
    output: Path = typer.Option(..., "--out", "-o", help="Packed outcome file to write"),
    n_items: Optional[int] = typer.Option(None, "--n-items", "-N", help="Number of items"),
    d: int = typer.Option(1, "--d", "-d", help="Maximum number of defectives"),
    delta: Optional[float] = typer.Option(None, "--delta", help="Allowed failure probability"),
    theta0: Optional[float] = typer.Option(None, "--theta0", help="False-positive probability"),
    theta1: Optional[float] = typer.Option(None, "--theta1", help="False-negative probability"),
    case: Optional[int] = typer.Option(None, "--case", help="Preset Reed-Solomon case 1-5"),
    rs_n: Optional[int] = typer.Option(None, "--rs-n", help="Block length within --case"),
    q: Optional[int] = typer.Option(None, "--q", help="Reed-Solomon alphabet size"),
    n: Optional[int] = typer.Option(None, "--n", help="Reed-Solomon block length"),
    r: Optional[int] = typer.Option(None, "--r", help="Reed-Solomon message length"),
    c: Optional[int] = typer.Option(None, "--c", help="Override the planned repetitions"),
    seed: int = typer.Option(0, "--seed", help="Base random seed"),
    trial: int = typer.Option(0, "--trial", help="Trial number within the seed"),
    defectives: Optional[str] = typer.Option(None, "--defectives", help="Comma list of defective items"),
    random_defectives: Optional[int] = typer.Option(
        None, "--random-defectives", help="Draw this many defectives uniformly"
    ),
    scaled_noise: bool = typer.Option(False, "--scaled-noise", help="Scale noise with pool size"),
    workers: Optional[int] = typer.Option(None, "--workers", help="Worker threads"),
) -> None:
    """Simulate noisy outcomes of every test and write them packed."""
    config = ConfigManager().load()
    try:
        if (defectives is None) == (random_defectives is None):
            raise UsageError("give exactly one of --defectives and --random-defectives")
        test_plan = make_plan(
            config, n_items, d, delta, theta0, theta1, case=case, rs_n=rs_n, q=q, n=n, r=r, c=c
        )
        if test_plan.t > config.sim_budget:
            console.print(f"[yellow]Simulating {test_plan.t:,} outcomes; this may take a while[/yellow]")
        items = parse_items(defectives)
        if items is not None:
            truth = GroundTruth.of(test_plan.n_items, items)
        else:
            truth = GroundTruth.random(test_plan.n_items, random_defectives or 0, truth_stream(seed, trial))
        outcomes = simulate_outcomes(
            MeasurementMatrix(test_plan),
            truth,
            test_plan.noise,
            seed,
            trial,
            scaled=scaled_noise,
            workers=workers or config.workers,
        )
        write_outcomes(output, outcomes)
    except DilutionGTError as exc:
        fail(str(exc))
    console.print(f"[green]Wrote {outcomes.t:,} outcomes[/green] {output}")
    console.print(f"Defectives: {list(truth.defectives)}")


@app.command()
def decode(
    outcome_file: Path = typer.Argument(..., help="Packed outcome file"),
    n_items: Optional[int] = typer.Option(None, "--n-items", "-N", help="Number of items"),
    d: int = typer.Option(1, "--d", "-d", help="Maximum number of defectives"),
    c: Optional[int] = typer.Option(None, "--c", help="Repetitions (default: from the file header)"),
    case: Optional[int] = typer.Option(None, "--case", help="Preset Reed-Solomon case 1-5"),
    rs_n: Optional[int] = typer.Option(None, "--rs-n", help="Block length within --case"),
    q: Optional[int] = typer.Option(None, "--q", help="Reed-Solomon alphabet size"),
    n: Optional[int] = typer.Option(None, "--n", help="Reed-Solomon block length"),
    r: Optional[int] = typer.Option(None, "--r", help="Reed-Solomon message length"),
    strict: Optional[bool] = typer.Option(None, "--strict/--no-strict", help="Require complementary halves"),
    workers: Optional[int] = typer.Option(None, "--workers", help="Worker threads"),
) -> None:
    """Decode a packed outcome file and print the defective set as JSON."""
    config = ConfigManager().load()
    if not outcome_file.exists():
        fail(f"File not found: {outcome_file}")
    try:
        outcomes = read_outcomes(outcome_file)
        if n_items is None and d == 1:
            # a d = 1 file has k = 2 log2(N)
            n_items = 1 << (outcomes.layout[1] // 2)
        test_plan = make_plan(
            config, n_items, d, case=case, rs_n=rs_n, q=q, n=n, r=r, c=c or outcomes.layout[2]
        )
        result = dec_d_defect(
            outcomes,
            test_plan,
            strict=config.strict if strict is None else strict,
            workers=workers or config.workers,
        )
    except DilutionGTError as exc:
        fail(str(exc))
    print_json({"defectives": list(result.defectives)})


@app.command()
def experiment(
    sweep: str = typer.Option("accuracy", "--sweep", help=f"One of: {', '.join(SWEEPS)}"),
    trials: int = typer.Option(100, "--trials", help="Trials per simulated plan"),
    seed: int = typer.Option(0, "--seed", help="Base random seed; trial r uses (seed, r)"),
    output: Optional[Path] = typer.Option(None, "--out", "-o", help="CSV file for per-row results"),
    n_items: Optional[int] = typer.Option(None, "--n-items", "-N", help="Number of items"),
    d: Optional[int] = typer.Option(None, "--d", "-d", help="Maximum number of defectives"),
    delta: Optional[float] = typer.Option(None, "--delta", help="Allowed failure probability"),
    theta0: Optional[float] = typer.Option(None, "--theta0", help="False-positive probability"),
    theta1: Optional[float] = typer.Option(None, "--theta1", help="False-negative probability"),
    case: Optional[int] = typer.Option(None, "--case", help="Preset Reed-Solomon case 1-5"),
    rs_n: Optional[int] = typer.Option(None, "--rs-n", help="Block length within --case"),
    defectives: Optional[str] = typer.Option(None, "--defectives", help="Pin every trial to these items"),
    strict: Optional[bool] = typer.Option(None, "--strict/--no-strict", help="Count only exact recovery"),
    scaled_noise: bool = typer.Option(False, "--scaled-noise", help="Scale noise with pool size"),
    workers: Optional[int] = typer.Option(None, "--workers", help="Parallel trials"),
    grid: bool = typer.Option(
        False, "--grid", help="Run every preset case x d x noise point that fits the budget"
    ),
) -> None:
    """Run a sweep and print its summary as JSON.

    CSV columns: the plan fields n_items, d, delta, theta0, theta1, lambda,
    xi, q, n, r, then the sweep's metrics. Test-count sweeps add p0, k, c,
    K, h, t and failure_bound; accuracy adds one row per trial with truth,
    decoded, success, exact and the wall times; timing adds c, t, trials,
    success_rate, mean_decode_seconds and the ratios to the previous plan.
    With --grid either full-sim sweep instead writes one row per preset
    case x d x noise point: case, c, t, simulated, trials, success_rate,
    exact_rate, mean_decode_seconds and decode_ns_per_outcome.
    """
    config = ConfigManager().load()
    try:
        experiment_config = ExperimentConfig(
            sweep=sweep,
            n_items=n_items,
            d=(3 if sweep in ("accuracy", "timing") and not grid else 1) if d is None else d,
            delta=config.delta if delta is None else delta,
            theta0=config.theta0 if theta0 is None else theta0,
            theta1=config.theta1 if theta1 is None else theta1,
            lambda_=config.lambda_,
            xi=config.xi,
            case=case,
            rs_n=rs_n,
            trials=trials,
            seed=seed,
            defectives=tuple(parse_items(defectives) or ()) or None,
            strict=config.strict if strict is None else strict,
            scaled_noise=scaled_noise,
            sim_budget=config.sim_budget,
            workers=workers or config.workers,
            output=str(output) if output else None,
            grid=grid,
        )
        runs = 0 if experiment_config.mode == "count-only" or grid else trials
        runs *= 3 if sweep == "timing" else 1
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            console=err_console,
            transient=True,
        ) as progress:
            task = progress.add_task(f"Running {sweep}", total=runs or None)
            rows, columns, summary = run_experiment(
                experiment_config, lambda done: progress.advance(task, done)
            )
    except DilutionGTError as exc:
        fail(str(exc))
    if output is not None:
        write_csv(output, rows, columns)
        err_console.print(f"[green]Wrote {len(rows)} rows[/green] {output}")
    print_json(summary)


@app.command("config")
def config_cmd(
    show: bool = typer.Option(False, "--show", help="Show current configuration"),
    lambda_: Optional[float] = typer.Option(None, "--lambda", help="Default Chernoff slack"),
    xi: Optional[float] = typer.Option(None, "--xi", help="Default majority margin"),
    delta: Optional[float] = typer.Option(None, "--delta", help="Default failure probability"),
    theta0: Optional[float] = typer.Option(None, "--theta0", help="Default false-positive probability"),
    theta1: Optional[float] = typer.Option(None, "--theta1", help="Default false-negative probability"),
    verify_budget: Optional[int] = typer.Option(None, "--verify-budget", help="Disjunctness work budget"),
    sim_budget: Optional[int] = typer.Option(None, "--sim-budget", help="Largest simulated t"),
    matrix_budget: Optional[int] = typer.Option(None, "--matrix-budget", help="Largest explicit t x N"),
    workers: Optional[int] = typer.Option(None, "--workers", help="Default worker threads"),
    strict: Optional[bool] = typer.Option(None, "--strict/--no-strict", help="Default decode mode"),
) -> None:
    """Manage dilution-gt configuration settings."""
    config_manager = ConfigManager()

    if show:
        config = config_manager.load()
        table = Table(title="Current Configuration")
        table.add_column("Setting")
        table.add_column("Value")
        for key, value in config.to_dict().items():
            table.add_row(key, str(value))
        console.print(table)
        return

    updates = {
        key: value
        for key, value in {
            "lambda_": lambda_,
            "xi": xi,
            "delta": delta,
            "theta0": theta0,
            "theta1": theta1,
            "verify_budget": verify_budget,
            "sim_budget": sim_budget,
            "matrix_budget": matrix_budget,
            "workers": workers,
            "strict": strict,
        }.items()
        if value is not None
    }
    if not updates:
        console.print("[yellow]No configuration changes specified. Use --show to view current settings.[/yellow]")
        return
    try:
        config_manager.update(**updates)
    except DilutionGTError as exc:
        fail(str(exc))
    console.print("[green]Configuration updated[/green]")


if __name__ == "__main__":
    app()
