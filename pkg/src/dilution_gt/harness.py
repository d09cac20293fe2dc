"""Experiment runner: test-count sweeps, accuracy trials and decode timing."""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .channel import GroundTruth, simulate, truth_stream
from .decoder import dec_d_defect
from .errors import BudgetExceededError, UsageError
from .measurement import MeasurementMatrix
from .plan import (
    RS_CASES,
    ChernoffParams,
    NoiseParams,
    TestPlan,
    build_plan,
    rs_case_lookup,
)
from .signature import log2_items

logger = logging.getLogger(__name__)

DEFAULT_SIM_BUDGET = 2 * 10**8

D1_ITEMS = (2**21, 2**28, 2**30, 2**32, 2**33)
D1_NOISE = ((0.002, 0.001), (0.02, 0.01), (0.05, 0.02), (0.2, 0.1))
DMULTI_DEFECTIVES = (3, 6, 16)
DMULTI_NOISE = ((0.002, 0.001), (0.2, 0.1))
TIMING_FACTORS = (1, 2, 4)

SWEEPS = ("tests-d1", "tests-dmulti", "accuracy", "timing")

PLAN_COLUMNS = ["n_items", "d", "delta", "theta0", "theta1", "lambda", "xi", "q", "n", "r"]
COUNT_COLUMNS = PLAN_COLUMNS + ["p0", "k", "c", "K", "h", "t", "failure_bound"]
TRIAL_COLUMNS = PLAN_COLUMNS + [
    "trial",
    "truth",
    "decoded",
    "success",
    "exact",
    "decode_seconds",
    "simulate_seconds",
]
TIMING_COLUMNS = PLAN_COLUMNS + [
    "c",
    "t",
    "trials",
    "success_rate",
    "mean_decode_seconds",
    "t_ratio",
    "time_ratio",
]
GRID_COLUMNS = PLAN_COLUMNS + [
    "case",
    "c",
    "t",
    "simulated",
    "trials",
    "success_rate",
    "exact_rate",
    "mean_decode_seconds",
    "decode_ns_per_outcome",
]

Progress = Callable[[int], None]


@dataclass
class ExperimentConfig:
    """What to run; unset plan fields fall back to the preset sweep grid."""

    sweep: str = "accuracy"
    n_items: Optional[int] = None
    d: int = 1
    delta: float = 0.001
    theta0: float = 0.2
    theta1: float = 0.1
    lambda_: float = 1 / 3
    xi: float = 0.001
    case: Optional[int] = None
    rs_n: Optional[int] = None
    trials: int = 100
    seed: int = 0
    defectives: Optional[Tuple[int, ...]] = None
    strict: bool = False
    scaled_noise: bool = False
    sim_budget: int = DEFAULT_SIM_BUDGET
    workers: int = 1
    output: Optional[str] = None
    noise_grid: Optional[Sequence[Tuple[float, float]]] = field(default=None, repr=False)
    grid: bool = False

    def __post_init__(self) -> None:
        if self.sweep not in SWEEPS:
            raise UsageError(f"sweep must be one of {', '.join(SWEEPS)}, got {self.sweep!r}")
        if self.trials < 1:
            raise UsageError(f"trials must be positive, got {self.trials}")
        if self.seed < 0:
            raise UsageError(f"seed must be non-negative, got {self.seed}")
        if self.grid and self.sweep not in ("accuracy", "timing"):
            raise UsageError("grid mode applies to the accuracy and timing sweeps")

    @property
    def mode(self) -> str:
        return "count-only" if self.sweep.startswith("tests-") else "full-sim"

    @property
    def chernoff(self) -> ChernoffParams:
        return ChernoffParams(self.lambda_, self.xi)

    @property
    def noise(self) -> NoiseParams:
        return NoiseParams(self.theta0, self.theta1)

    def plan(self, delta: Optional[float] = None) -> TestPlan:
        """The simulated plan; d = 1 defaults to N = 2^21, d >= 2 to case 1."""
        n_items = self.n_items
        case = self.case
        if self.d == 1 and n_items is None:
            n_items = D1_ITEMS[0]
        if self.d >= 2 and case is None:
            case = 1
        return build_plan(
            n_items,
            self.d,
            self.delta if delta is None else delta,
            self.noise,
            self.chernoff,
            case=case,
            rs_n=self.rs_n,
        )


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    truth: Tuple[int, ...]
    decoded: Tuple[int, ...]
    success: bool
    exact: bool
    decode_seconds: float
    simulate_seconds: float

    def to_row(self) -> Dict[str, Any]:
        row = asdict(self)
        row["truth"] = " ".join(map(str, self.truth))
        row["decoded"] = " ".join(map(str, self.decoded))
        return row


def is_success(truth: Sequence[int], decoded: Sequence[int], strict: bool = False) -> bool:
    """Superset recovery, or exact recovery when ``strict``."""
    if strict:
        return set(truth) == set(decoded)
    return set(truth) <= set(decoded)


def sweep_test_counts(config: ExperimentConfig) -> List[Dict[str, Any]]:
    """Plan sizes over the d = 1 or d >= 2 grid; arithmetic only."""
    chernoff = config.chernoff
    rows = []
    if config.sweep == "tests-d1":
        grid = config.noise_grid or D1_NOISE
        items = (config.n_items,) if config.n_items else D1_ITEMS
        for n_items in items:
            for theta0, theta1 in grid:
                plan = build_plan(n_items, 1, config.delta, NoiseParams(theta0, theta1), chernoff)
                rows.append(plan.to_dict())
    elif config.sweep == "tests-dmulti":
        rows = [{**plan.to_dict(), "case": case} for case, plan in multi_defective_plans(config)]
    else:
        raise UsageError(f"{config.sweep} is not a test-count sweep")
    return rows


def multi_defective_plans(config: ExperimentConfig) -> Iterator[Tuple[int, TestPlan]]:
    """(case, plan) over preset cases x d x noise, narrowed by any fixed fields."""
    grid = config.noise_grid or DMULTI_NOISE
    cases = (config.case,) if config.case else tuple(RS_CASES)
    ds = (config.d,) if config.d >= 2 else DMULTI_DEFECTIVES
    for case in cases:
        for d in ds:
            setting = rs_case_lookup(case, d=d)
            for theta0, theta1 in grid:
                plan = build_plan(
                    None,
                    d,
                    config.delta,
                    NoiseParams(theta0, theta1),
                    config.chernoff,
                    rs=(setting.q, setting.n, setting.r),
                )
                yield case, plan


def _check_budget(plan: TestPlan, budget: int) -> None:
    if plan.t > budget:
        h, k, c = plan.layout
        logger.error("full simulation of t=%d outcomes refused", plan.t)
        raise BudgetExceededError(
            "full simulation", plan.t, budget, f"t = h*k*c = {h}*{k}*{c}; use a count-only sweep"
        )


def run_trial(
    mat: MeasurementMatrix, config: ExperimentConfig, trial: int
) -> TrialRecord:
    plan = mat.plan
    if config.defectives is not None:
        truth = GroundTruth.of(plan.n_items, config.defectives)
    else:
        truth = GroundTruth.random(plan.n_items, plan.d, truth_stream(config.seed, trial))
    started = time.perf_counter()
    outcomes = simulate(mat, truth, config.noise, config.seed, trial, scaled=config.scaled_noise)
    simulated = time.perf_counter()
    result = dec_d_defect(outcomes, plan, strict=config.strict)
    decoded = time.perf_counter()
    success = is_success(truth.defectives, result.defectives, config.strict)
    if not success:
        logger.debug("trial %d missed: truth %s decoded %s", trial, truth.defectives, result.defectives)
    return TrialRecord(
        trial=trial,
        truth=truth.defectives,
        decoded=result.defectives,
        success=success,
        exact=is_success(truth.defectives, result.defectives, strict=True),
        decode_seconds=decoded - simulated,
        simulate_seconds=simulated - started,
    )


def summarize(records: Sequence[TrialRecord], plan: TestPlan) -> Dict[str, Any]:
    count = len(records)
    successes = sum(record.success for record in records)
    return {
        **plan.to_dict(),
        "trials": count,
        "successes": successes,
        "success_rate": successes / count if count else math.nan,
        "exact_rate": sum(record.exact for record in records) / count if count else math.nan,
        "mean_decode_seconds": float(np.mean([r.decode_seconds for r in records])) if count else math.nan,
        "mean_simulate_seconds": float(np.mean([r.simulate_seconds for r in records])) if count else math.nan,
    }


def run_trials(
    config: ExperimentConfig,
    plan: Optional[TestPlan] = None,
    progress: Optional[Progress] = None,
) -> Tuple[List[TrialRecord], Dict[str, Any]]:
    """Simulate and decode ``config.trials`` independent trials."""
    plan = plan or config.plan()
    _check_budget(plan, config.sim_budget)
    mat = MeasurementMatrix(plan)
    if config.scaled_noise:
        mat.block_row_weights  # computed once, shared by all trials

    def one(trial: int) -> TrialRecord:
        record = run_trial(mat, config, trial)
        if progress is not None:
            progress(1)
        return record

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(one, range(config.trials)))
    else:
        records = [one(trial) for trial in range(config.trials)]
    records.sort(key=lambda record: record.trial)
    summary = summarize(records, plan)
    logger.info("%d/%d trials succeeded", summary["successes"], summary["trials"])
    return records, summary


def scaled_delta(plan: TestPlan, factor: float) -> float:
    """Precision whose repetition count is ``factor`` times the plan's (before rounding)."""
    log_n = log2_items(plan.n_items)
    target = 2 * log_n if plan.d == 1 else 2 * plan.d**2 * log_n**3
    return target / (target / plan.delta) ** factor


def timing_sweep(
    config: ExperimentConfig, progress: Optional[Progress] = None
) -> List[Dict[str, Any]]:
    """Mean decode time for plans whose t roughly doubles at each step."""
    base = config.plan()
    rows = []
    for factor in TIMING_FACTORS:
        plan = config.plan(scaled_delta(base, factor))
        _, summary = run_trials(config, plan, progress)
        rows.append(summary)
    for previous, current in zip(rows, rows[1:]):
        current["time_ratio"] = current["mean_decode_seconds"] / previous["mean_decode_seconds"]
        current["t_ratio"] = current["t"] / previous["t"]
    return rows


def grid_sweep(
    config: ExperimentConfig, progress: Optional[Progress] = None
) -> List[Dict[str, Any]]:
    """Accuracy and decode time at every preset-case grid point.

    Points whose t exceeds the simulation budget get a sizing row with
    ``simulated`` False instead of trials.
    """
    rows = []
    for case, plan in multi_defective_plans(config):
        row: Dict[str, Any] = {**plan.to_dict(), "case": case}
        if plan.t > config.sim_budget:
            logger.info("case %d d=%d: t=%d over budget, sizing only", case, plan.d, plan.t)
            rows.append(
                {
                    **row,
                    "simulated": False,
                    "trials": 0,
                    "success_rate": math.nan,
                    "exact_rate": math.nan,
                    "mean_decode_seconds": math.nan,
                    "decode_ns_per_outcome": math.nan,
                }
            )
            continue
        point = replace(config, d=plan.d, theta0=plan.noise.theta0, theta1=plan.noise.theta1)
        _, summary = run_trials(point, plan, progress)
        rows.append(
            {
                **row,
                **summary,
                "simulated": True,
                "decode_ns_per_outcome": 1e9 * summary["mean_decode_seconds"] / plan.t,
            }
        )
    return rows


def summarize_grid(config: ExperimentConfig, rows: Sequence[Dict[str, Any]]) -> Dict[str, Any]:
    simulated = [row for row in rows if row["simulated"]]
    return {
        "sweep": config.sweep,
        "grid": True,
        "points": len(rows),
        "simulated": len(simulated),
        "min_success_rate": min((row["success_rate"] for row in simulated), default=math.nan),
        "max_decode_ns_per_outcome": max(
            (row["decode_ns_per_outcome"] for row in simulated), default=math.nan
        ),
    }


def majority_failure_rate(p: float, c: int, samples: int, seed: int = 0) -> float:
    """Share of groups of ``c`` Bernoulli(p)-correct outcomes without a correct strict majority."""
    if not 0.0 <= p <= 1.0 or c < 1 or samples < 1 or seed < 0:
        raise UsageError("need 0 <= p <= 1, c >= 1, samples >= 1 and seed >= 0")
    rng = np.random.Generator(np.random.Philox(seed))
    correct = rng.binomial(c, p, size=samples)
    return float(np.count_nonzero(2 * correct <= c)) / samples


def run_experiment(
    config: ExperimentConfig, progress: Optional[Progress] = None
) -> Tuple[List[Dict[str, Any]], List[str], Dict[str, Any]]:
    """Run a sweep; returns CSV rows, their columns and a JSON summary."""
    if config.mode == "count-only":
        rows = sweep_test_counts(config)
        summary = {
            "sweep": config.sweep,
            "plans": len(rows),
            "max_K": max(row["K"] for row in rows),
            "max_t": max(row["t"] for row in rows),
        }
        columns = COUNT_COLUMNS + (["case"] if config.sweep == "tests-dmulti" else [])
        return rows, columns, summary
    if config.grid:
        rows = grid_sweep(config, progress)
        return rows, GRID_COLUMNS, summarize_grid(config, rows)
    if config.sweep == "timing":
        rows = timing_sweep(config, progress)
        summary = {
            "sweep": config.sweep,
            "t": [row["t"] for row in rows],
            "mean_decode_seconds": [row["mean_decode_seconds"] for row in rows],
            "time_ratios": [row["time_ratio"] for row in rows[1:]],
        }
        return rows, TIMING_COLUMNS, summary
    records, summary = run_trials(config, progress=progress)
    plan_fields = {key: summary[key] for key in PLAN_COLUMNS}
    rows = [{**plan_fields, **record.to_row()} for record in records]
    return rows, TRIAL_COLUMNS, {"sweep": config.sweep, **summary}
