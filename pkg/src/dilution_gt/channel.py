"""Simulated test outcomes under the dilution type-2 channel.

A test whose noiseless outcome is 0 reads 1 with probability theta0, one
whose noiseless outcome is 1 reads 0 with probability theta1. With the
scaled profile both probabilities shrink in proportion to the pool size
relative to N/2, so smaller pools are more reliable.

Randomness comes from Philox streams keyed by (seed, trial, chunk) where
a chunk is a fixed run of consecutive rows, so the draw used for row
``i`` never depends on evaluation order or on the number of workers.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Iterable, Tuple

import numpy as np

from .codes import symbols
from .errors import UsageError
from .measurement import MeasurementMatrix
from .plan import NoiseParams, check_condition

logger = logging.getLogger(__name__)

CHUNK_ROWS = 1 << 16


def binary_bits(values: Any) -> np.ndarray:
    """Flat ``uint8`` copy of 0/1 outcomes; any other value is a usage error."""
    raw = np.asarray(values)
    if raw.dtype != np.bool_ and raw.size:
        if raw.dtype.kind in "iu":
            valid = raw.min() >= 0 and raw.max() <= 1
        else:
            valid = bool(np.all((raw == 0) | (raw == 1)))
        if not valid:
            raise UsageError("outcomes must be 0 or 1")
    return np.ascontiguousarray(raw, dtype=np.uint8).ravel()


def check_seed(seed: int, trial: int = 0) -> None:
    if seed < 0 or trial < 0:
        raise UsageError(f"seed and trial must be non-negative, got seed={seed}, trial={trial}")


@dataclass(frozen=True)
class GroundTruth:
    """The defective items, strictly increasing and 1-based."""

    n_items: int
    defectives: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        items = tuple(int(j) for j in self.defectives)
        if any(b <= a for a, b in zip(items, items[1:])):
            raise UsageError("defectives must be strictly increasing")
        if items and not (1 <= items[0] and items[-1] <= self.n_items):
            raise UsageError(f"defectives must lie in 1..{self.n_items}")
        object.__setattr__(self, "defectives", items)

    @classmethod
    def of(cls, n_items: int, items: Iterable[int]) -> "GroundTruth":
        """Ground truth from an unordered collection of distinct items."""
        listed = [int(j) for j in items]
        if len(set(listed)) != len(listed):
            raise UsageError("defectives must be distinct")
        return cls(n_items, tuple(sorted(listed)))

    @classmethod
    def random(cls, n_items: int, count: int, rng: np.random.Generator) -> "GroundTruth":
        """Uniform ``count``-subset of 1..N."""
        if not 0 <= count <= n_items:
            raise UsageError(f"cannot draw {count} defectives from {n_items} items")
        chosen = rng.choice(n_items, size=count, replace=False) + 1
        return cls(n_items, tuple(sorted(int(j) for j in chosen)))

    def __len__(self) -> int:
        return len(self.defectives)


@dataclass(frozen=True)
class OutcomeVector:
    """Test outcomes in (block, signature row, repetition) order."""

    bits: np.ndarray
    layout: Tuple[int, int, int]

    def __post_init__(self) -> None:
        h, k, c = self.layout
        bits = binary_bits(self.bits)
        if bits.size != h * k * c:
            raise UsageError(f"{bits.size} outcomes do not fill layout {h} x {k} x {c}")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "layout", (int(h), int(k), int(c)))

    @property
    def t(self) -> int:
        return int(self.bits.size)

    def groups(self) -> np.ndarray:
        """View shaped ``(h, k, c)``."""
        return self.bits.reshape(self.layout)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OutcomeVector):
            return NotImplemented
        return self.layout == other.layout and np.array_equal(self.bits, other.bits)

    __hash__ = None  # type: ignore[assignment]


def noiseless_outcome(mat: MeasurementMatrix, i: int, truth: GroundTruth) -> int:
    """OR of row ``i`` of T over the defective items."""
    return int(any(mat.entry(i, j) for j in truth.defectives))


def noisy_outcome(z: int, noise: NoiseParams, draw: float) -> int:
    """Pass ``z`` through the channel given one uniform draw in [0, 1)."""
    if z:
        return 0 if draw < noise.theta1 else 1
    return 1 if draw < noise.theta0 else 0


def block_signatures(mat: MeasurementMatrix, truth: GroundTruth) -> np.ndarray:
    """Noiseless ``h x k`` outcomes before repetition."""
    plan = mat.plan
    result = np.zeros((plan.h, plan.k), dtype=np.uint8)
    if not truth.defectives:
        return result
    items = np.asarray(truth.defectives, dtype=np.int64)
    columns = mat.M.columns(items)
    if mat.G is None:
        result[0] = np.bitwise_or.reduce(columns, axis=1)
        return result
    table = symbols(mat.G.code, items)
    blocks = np.arange(mat.G.code.n).reshape(-1, 1) * mat.G.q + table
    for index in range(items.size):
        result[blocks[:, index]] |= columns[:, index]
    return result


def row_stream(seed: int, trial: int, chunk: int) -> np.random.Generator:
    """Philox generator owning rows ``chunk * CHUNK_ROWS`` onwards."""
    check_seed(seed, trial)
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(trial, chunk))
    return np.random.Generator(np.random.Philox(key=sequence.generate_state(2, dtype=np.uint64)))


def row_uniforms(seed: int, trial: int, start: int, stop: int) -> np.ndarray:
    """The uniform draws assigned to rows ``start..stop-1`` (0-based)."""
    draws = []
    for chunk in range(start // CHUNK_ROWS, (stop - 1) // CHUNK_ROWS + 1 if stop > start else 0):
        base = chunk * CHUNK_ROWS
        block = row_stream(seed, trial, chunk).random(CHUNK_ROWS)
        draws.append(block[max(start, base) - base : min(stop, base + CHUNK_ROWS) - base])
    return np.concatenate(draws) if draws else np.empty(0)


def _flip_thresholds(
    mat: MeasurementMatrix, noise: NoiseParams, scaled: bool
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-(block, signature row) false-positive and false-negative rates."""
    shape = (mat.plan.h, mat.plan.k)
    if not scaled:
        return np.full(shape, noise.theta0), np.full(shape, noise.theta1)
    factor = 2.0 * mat.block_row_weights / mat.n_items
    return noise.theta0 * factor, noise.theta1 * factor


def simulate(
    mat: MeasurementMatrix,
    truth: GroundTruth,
    noise: NoiseParams,
    seed: int,
    trial: int = 0,
    scaled: bool = False,
    workers: int = 1,
) -> OutcomeVector:
    """Noisy outcomes of every test in T for the given defectives.

    A noise level violating the majority condition is logged, not refused.
    """
    check_seed(seed, trial)
    plan = mat.plan
    if truth.n_items != plan.n_items:
        raise UsageError(f"ground truth has N={truth.n_items}, plan has N={plan.n_items}")
    if len(truth) > plan.d:
        raise UsageError(f"{len(truth)} defectives exceed the plan's d={plan.d}")
    if not check_condition(noise, plan.chernoff):
        logger.warning("noise (%.4f, %.4f) violates the majority condition", noise.theta0, noise.theta1)

    signatures = block_signatures(mat, truth)
    theta0, theta1 = _flip_thresholds(mat, noise, scaled)
    rates = np.where(signatures == 1, theta1, theta0).ravel()
    c = plan.c
    outcomes = np.empty(plan.t, dtype=np.uint8)

    def fill(chunk: int) -> None:
        start = chunk * CHUNK_ROWS
        stop = min(start + CHUNK_ROWS, plan.t)
        groups = np.arange(start, stop) // c
        draws = row_uniforms(seed, trial, start, stop)
        flips = draws < rates[groups]
        outcomes[start:stop] = signatures.ravel()[groups] ^ flips

    chunks = range((plan.t + CHUNK_ROWS - 1) // CHUNK_ROWS)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, chunks))
    else:
        for chunk in chunks:
            fill(chunk)
    logger.debug("simulated %d outcomes (seed=%d, trial=%d)", plan.t, seed, trial)
    return OutcomeVector(outcomes, plan.layout)


def truth_stream(seed: int, trial: int) -> np.random.Generator:
    """Generator for drawing the defective set of one trial."""
    check_seed(seed, trial)
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(trial,))
    return np.random.Generator(np.random.Philox(key=sequence.generate_state(2, dtype=np.uint64)))
