"""Test-plan arithmetic: noise condition, repetition counts and sizes.

All plans assume the dilution type-2 channel: a pool of at most N/2
items returns a false positive with probability theta0 and a false
negative with probability theta1. Each signature test is repeated ``c``
times so that a majority vote recovers its noiseless outcome.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

from .errors import DomainError, UsageError
from .signature import log2_items

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoiseParams:
    """False-positive (theta0) and false-negative (theta1) probabilities."""

    theta0: float = 0.0
    theta1: float = 0.0

    def __post_init__(self) -> None:
        for name in ("theta0", "theta1"):
            value = getattr(self, name)
            if not 0.0 <= value <= 0.5:
                raise UsageError(f"{name} must lie in [0, 1/2], got {value}")


@dataclass(frozen=True)
class ChernoffParams:
    """Chernoff slack ``lambda_`` in (0, 1) and majority margin ``xi`` > 0."""

    lambda_: float = 1 / 3
    xi: float = 0.001

    def __post_init__(self) -> None:
        if not 0.0 < self.lambda_ < 1.0:
            raise DomainError(f"lambda must lie in (0, 1), got {self.lambda_}")
        if self.xi <= 0.0:
            raise DomainError(f"xi must be positive, got {self.xi}")


def p0(noise: NoiseParams) -> float:
    """Probability that a half-population test is correct."""
    return 1.0 - (noise.theta0 + noise.theta1) / 2.0


def condition_bound(chernoff: ChernoffParams) -> float:
    """Largest admissible theta0 + theta1."""
    if chernoff.lambda_ >= 1.0:
        raise DomainError(f"lambda must be below 1, got {chernoff.lambda_}")
    return 2.0 * (1.0 - (0.5 + chernoff.xi) / (1.0 - chernoff.lambda_))


def check_condition(noise: NoiseParams, chernoff: ChernoffParams) -> bool:
    total = noise.theta0 + noise.theta1
    bound = condition_bound(chernoff)
    # closed condition; isclose absorbs rounding at the boundary
    return total <= bound or math.isclose(total, bound, rel_tol=1e-12, abs_tol=1e-15)


def pool_correctness(theta0_i: float, theta1_i: float, weight: int, n_items: int) -> float:
    """Correctness of a test pooling ``weight`` items, averaged over the defective's position."""
    if not 0 <= weight <= n_items:
        raise UsageError(f"test weight {weight} outside 0..{n_items}")
    share = weight / n_items
    return (1.0 - theta0_i) * (1.0 - share) + (1.0 - theta1_i) * share


def _check_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")


def _repetitions(target: float, chernoff: ChernoffParams, p0_value: float) -> int:
    if not 0.0 < p0_value <= 1.0:
        raise DomainError(f"p0 must lie in (0, 1], got {p0_value}")
    value = 2.0 * math.log(target) / (p0_value * chernoff.lambda_**2)
    return max(1, math.ceil(value))


def repetitions_single(
    n_items: int, delta: float, chernoff: ChernoffParams, p0_value: float
) -> int:
    """Repetitions per signature test when there is at most one defective."""
    _check_delta(delta)
    log_n = log2_items(n_items)
    return _repetitions(2 * log_n / delta, chernoff, p0_value)


def repetitions_multi(
    n_items: int, d: int, delta: float, chernoff: ChernoffParams, p0_value: float
) -> int:
    """Repetitions per signature test for up to ``d >= 2`` defectives."""
    if d < 2:
        raise UsageError(f"d must be at least 2, got {d}")
    _check_delta(delta)
    log_n = log2_items(n_items)
    return _repetitions(2 * d**2 * log_n**3 / delta, chernoff, p0_value)


def chernoff_failure_bound(c: int, chernoff: ChernoffParams, p0_value: float) -> float:
    """Upper bound on the chance that a group of ``c`` repetitions has no correct majority."""
    if c < 0:
        raise UsageError(f"c must be non-negative, got {c}")
    return math.exp(-(chernoff.lambda_**2) * p0_value * c / 2.0)


class RSCase(NamedTuple):
    """One preset Reed-Solomon setting used by the multi-defective sweeps."""

    case: int
    d_index: int
    q: int
    n: int
    r: int
    d_minus_1: int
    h: int
    n_items: int

    @property
    def d(self) -> int:
        return self.d_minus_1 + 1

    @property
    def row_bound_holds(self) -> bool:
        log_n = log2_items(self.n_items)
        return self.h < self.d**2 * log_n**2


# case -> (q, block lengths for d - 1 = 2, 5, 15, r)
RS_CASES: Dict[int, Tuple[int, Tuple[int, int, int], int]] = {
    1: (128, (5, 11, 31), 3),
    2: (128, (7, 16, 46), 4),
    3: (64, (11, 21, 61), 5),
    4: (256, (7, 16, 46), 4),
    5: (2048, (5, 11, 31), 3),
}


def rs_case(case: int, d_index: int) -> RSCase:
    if case not in RS_CASES:
        raise UsageError(f"case must be one of {sorted(RS_CASES)}, got {case}")
    if not 1 <= d_index <= 3:
        raise UsageError(f"d index must be 1, 2 or 3, got {d_index}")
    q, lengths, r = RS_CASES[case]
    n = lengths[d_index - 1]
    return RSCase(case, d_index, q, n, r, (n - 1) // (r - 1), q * n, q**r)


def rs_cases() -> List[RSCase]:
    return [rs_case(case, index) for case in RS_CASES for index in (1, 2, 3)]


def rs_case_lookup(case: int, rs_n: Optional[int] = None, d: Optional[int] = None) -> RSCase:
    """Case entry by block length, or the shortest one that handles ``d`` defectives."""
    configs = [rs_case(case, index) for index in (1, 2, 3)]
    if rs_n is not None:
        for config in configs:
            if config.n == rs_n:
                return config
        raise UsageError(f"case {case} has no entry with n={rs_n}")
    for config in configs:
        if d is None or config.d_minus_1 >= d - 1:
            return config
    raise UsageError(f"case {case} cannot handle d={d}")


@dataclass(frozen=True)
class TestPlan:
    """Every derived quantity of a test design."""

    __test__ = False

    n_items: int
    d: int
    delta: float
    noise: NoiseParams
    chernoff: ChernoffParams
    c: int
    rs: Optional[Tuple[int, int, int]] = None

    @property
    def p0(self) -> float:
        return p0(self.noise)

    @property
    def log_n(self) -> int:
        return log2_items(self.n_items)

    @property
    def k(self) -> int:
        return 2 * self.log_n

    @property
    def K(self) -> int:
        return self.c * self.k

    @property
    def h(self) -> int:
        if self.rs is None:
            return 1
        q, n, _ = self.rs
        return q * n

    @property
    def t(self) -> int:
        return self.h * self.K

    @property
    def layout(self) -> Tuple[int, int, int]:
        return self.h, self.k, self.c

    @property
    def condition_holds(self) -> bool:
        return check_condition(self.noise, self.chernoff)

    def to_dict(self) -> Dict[str, Any]:
        q, n, r = self.rs if self.rs is not None else (None, None, None)
        return {
            "n_items": self.n_items,
            "d": self.d,
            "delta": self.delta,
            "theta0": self.noise.theta0,
            "theta1": self.noise.theta1,
            "lambda": self.chernoff.lambda_,
            "xi": self.chernoff.xi,
            "p0": self.p0,
            "condition_holds": self.condition_holds,
            "k": self.k,
            "c": self.c,
            "K": self.K,
            "q": q,
            "n": n,
            "r": r,
            "h": self.h,
            "t": self.t,
            "failure_bound": plan_failure_bound(self),
        }


def _validate_rs(n_items: int, d: int, rs: Tuple[int, int, int]) -> None:
    q, n, r = rs
    if q**r != n_items:
        raise UsageError(f"N={n_items} does not equal q^r = {q}^{r}")
    capacity = n_items - 1 if r == 1 else (n - 1) // (r - 1)
    if d - 1 > capacity:
        raise UsageError(f"(q={q}, n={n}, r={r}) is only {capacity}-disjunct, need d-1={d - 1}")


def build_plan(
    n_items: Optional[int],
    d: int,
    delta: float,
    noise: NoiseParams,
    chernoff: Optional[ChernoffParams] = None,
    rs: Optional[Tuple[int, int, int]] = None,
    case: Optional[int] = None,
    rs_n: Optional[int] = None,
) -> TestPlan:
    """Assemble a validated :class:`TestPlan`.

    ``d = 1`` uses the unmasked signature matrix (h = 1). For ``d >= 2`` the
    Reed-Solomon parameters come from ``rs`` or from a preset ``case``.
    """
    chernoff = chernoff or ChernoffParams()
    if d < 1:
        raise UsageError(f"d must be positive, got {d}")
    if not check_condition(noise, chernoff):
        logger.warning(
            "theta0 + theta1 = %.4f exceeds %.4f; majority votes lose their guarantee",
            noise.theta0 + noise.theta1,
            condition_bound(chernoff),
        )
    p0_value = p0(noise)
    if d == 1:
        if n_items is None:
            raise UsageError("number of items is required when d = 1")
        c = repetitions_single(n_items, delta, chernoff, p0_value)
        return TestPlan(n_items, d, delta, noise, chernoff, c)

    if rs is None:
        if case is None:
            raise UsageError("d >= 2 needs Reed-Solomon parameters or a preset case")
        config = rs_case_lookup(case, rs_n, d)
        rs = (config.q, config.n, config.r)
    if n_items is None:
        n_items = rs[0] ** rs[2]
    _validate_rs(n_items, d, rs)
    c = repetitions_multi(n_items, d, delta, chernoff, p0_value)
    plan = TestPlan(n_items, d, delta, noise, chernoff, c, tuple(rs))  # type: ignore[arg-type]
    logger.info("plan N=%d d=%d: c=%d, t=%d", n_items, d, c, plan.t)
    return plan


def plan_failure_bound(plan: TestPlan) -> float:
    """Union bound on the decoder missing a defective under this plan."""
    groups = plan.k * plan.h
    return min(1.0, groups * chernoff_failure_bound(plan.c, plan.chernoff, plan.p0))

