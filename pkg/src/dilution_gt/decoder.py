"""Majority-vote decoding of the outcomes of T.

Each block of ``k * c`` outcomes is reduced to ``k`` bits by majority
vote over its repetition groups, then read as a signature: weight
``log2(N)`` names one defective, anything else names none. The union of
the blocks' findings is the decoded set. One pass, O(t) work.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .channel import OutcomeVector, binary_bits
from .errors import UsageError
from .plan import TestPlan
from .signature import decode_signature, log2_items

logger = logging.getLogger(__name__)

# blocks are decoded in batches of about this many outcome bits
BATCH_BITS = 1 << 22

Outcomes = Union[OutcomeVector, np.ndarray, Sequence[int]]


@dataclass(frozen=True)
class DecodeResult:
    """Decoded defectives plus what each block contributed."""

    defectives: Tuple[int, ...]
    per_block: Tuple[Optional[int], ...]

    @classmethod
    def from_blocks(cls, per_block: Sequence[Optional[int]]) -> "DecodeResult":
        found = sorted({index for index in per_block if index is not None})
        return cls(tuple(found), tuple(per_block))


def majority(group: Sequence[int]) -> int:
    """1 only when ones are a strict majority; ties read as 0."""
    bits = np.asarray(group, dtype=np.int64)
    return int(2 * int(bits.sum()) > bits.size)


def dec1_defect(y_star: Sequence[int], n_items: int, c: int, strict: bool = False) -> Optional[int]:
    """Decode one block of ``2 * log2(N) * c`` outcomes to an item or None."""
    k = 2 * log2_items(n_items)
    bits = binary_bits(y_star)
    if c < 1 or bits.size != k * c:
        raise UsageError(f"block has {bits.size} outcomes, expected k*c = {k}*{c}")
    counts = bits.reshape(k, c).sum(axis=1, dtype=np.int64)
    return decode_signature((2 * counts > c).astype(np.uint8), n_items, strict=strict)


def _decode_batch(groups: np.ndarray, log_n: int, strict: bool) -> np.ndarray:
    """Item per block (0 for none) for a ``(blocks, k, c)`` batch."""
    c = groups.shape[2]
    votes = (2 * groups.sum(axis=2, dtype=np.int64) > c).astype(np.int64)
    upper, lower = votes[:, :log_n], votes[:, log_n:]
    single = votes.sum(axis=1) == log_n
    if strict:
        single &= np.all(upper != lower, axis=1)
    weights = np.left_shift(1, np.arange(log_n - 1, -1, -1, dtype=np.int64))
    return np.where(single, upper @ weights + 1, 0)


def _as_bits(y: Outcomes, plan: TestPlan) -> np.ndarray:
    if isinstance(y, OutcomeVector):
        if y.layout != plan.layout:
            raise UsageError(f"outcome layout {y.layout} does not match plan {plan.layout}")
        return y.bits
    bits = binary_bits(y)
    if bits.size != plan.t:
        raise UsageError(f"got {bits.size} outcomes, plan has t = {plan.t}")
    return bits


def dec_d_defect(
    y: Outcomes, plan: TestPlan, strict: bool = False, workers: int = 1
) -> DecodeResult:
    """Decode up to ``d`` defectives from all ``t`` outcomes."""
    bits = _as_bits(y, plan)
    h, k, c = plan.layout
    groups = bits.reshape(h, k, c)
    per_batch = max(1, BATCH_BITS // (k * c))
    starts = list(range(0, h, per_batch))

    def run(start: int) -> np.ndarray:
        return _decode_batch(groups[start : start + per_batch], plan.log_n, strict)

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(run, starts))
    else:
        batches = [run(start) for start in starts]
    found = np.concatenate(batches)
    assert found.max(initial=0) <= plan.n_items
    per_block: List[Optional[int]] = [int(v) if v else None for v in found]
    result = DecodeResult.from_blocks(per_block)
    logger.debug("decoded %d defectives from %d blocks", len(result.defectives), h)
    return result
