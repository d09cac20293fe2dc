"""The t x N measurement matrix T, evaluated entry by entry.

Rows are laid out block by block: block ``w`` of G contributes ``k``
signature rows, each repeated ``c`` times, so global row ``i`` maps to
(block, signature row, repetition) with the repetition varying fastest.
For d = 1 there is a single block and no mask.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Optional, Tuple

import numpy as np

from .codes import DisjunctMatrix
from .errors import BudgetExceededError, UsageError
from .plan import TestPlan
from .signature import SignatureMatrix, m_entry

logger = logging.getLogger(__name__)

DEFAULT_MATRIX_BUDGET = 10**7


def row_decompose(i: int, plan: TestPlan) -> Tuple[int, int, int]:
    """Global row ``i`` as (block w, signature row i', repetition l), all 1-based."""
    if not 1 <= i <= plan.t:
        raise UsageError(f"row {i} outside 1..{plan.t}")
    block, rest = divmod(i - 1, plan.k * plan.c)
    sig_row, rep = divmod(rest, plan.c)
    return block + 1, sig_row + 1, rep + 1


@dataclass(frozen=True)
class MeasurementMatrix:
    """Lazy view of T for a :class:`TestPlan`."""

    plan: TestPlan
    G: Optional[DisjunctMatrix] = field(init=False)
    M: SignatureMatrix = field(init=False)

    def __post_init__(self) -> None:
        plan = self.plan
        if plan.rs is None:
            G = None
        else:
            q, n, r = plan.rs
            if q**r != plan.n_items:
                raise UsageError(f"N={plan.n_items} does not equal q^r = {q}^{r}")
            G = DisjunctMatrix.from_params(q, n, r)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "M", SignatureMatrix(plan.n_items))

    @property
    def n_items(self) -> int:
        return self.plan.n_items

    @property
    def t(self) -> int:
        return self.plan.t

    def entry(self, i: int, j: int) -> int:
        w, sig_row, _ = row_decompose(i, self.plan)
        bit = m_entry(self.n_items, sig_row, j)
        if self.G is None or not bit:
            return bit
        return self.G.entry(w, j)

    def block_support(self, w: int) -> np.ndarray:
        """Items pooled by block ``w`` (all items when there is no mask)."""
        if self.G is None:
            if w != 1:
                raise UsageError(f"block {w} outside 1..1")
            return np.arange(1, self.n_items + 1, dtype=np.int64)
        return self.G.row_support(w)

    def row_weight(self, i: int) -> int:
        """Number of items pooled in test ``i``."""
        w, sig_row, _ = row_decompose(i, self.plan)
        return int(self.block_row_weights[w - 1, sig_row - 1])

    @cached_property
    def block_row_weights(self) -> np.ndarray:
        """``h x k`` pool sizes; repetitions share their signature row's size."""
        if self.G is None:
            return np.full((1, self.plan.k), self.n_items // 2, dtype=np.int64)
        weights = np.empty((self.plan.h, self.plan.k), dtype=np.int64)
        for w in range(1, self.plan.h + 1):
            weights[w - 1] = self.M.columns(self.G.row_support(w)).sum(axis=1)
        return weights

    def iter_blocks(self) -> Iterator[np.ndarray]:
        """Explicit ``K x N`` blocks A^w, one at a time."""
        full = self.M.materialize()
        for w in range(1, self.plan.h + 1):
            masked = full
            if self.G is not None:
                mask = np.zeros(self.n_items, dtype=np.uint8)
                mask[self.G.row_support(w) - 1] = 1
                masked = full * mask
            yield np.repeat(masked, self.plan.c, axis=0)

    def materialize(self, budget: int = DEFAULT_MATRIX_BUDGET) -> np.ndarray:
        size = self.t * self.n_items
        if size > budget:
            logger.error("refusing to materialise a %d x %d matrix", self.t, self.n_items)
            raise BudgetExceededError("measurement matrix", size, budget, "raise --budget")
        return np.vstack(list(self.iter_blocks()))


def t_entry(mat: MeasurementMatrix, i: int, j: int) -> int:
    """Entry (i, j) of T, both 1-based."""
    return mat.entry(i, j)
