"""Reed-Solomon codewords concatenated with the identity code.

Item ``j`` (1-based) is the message whose base-q digits are those of
``j - 1``, least significant digit first, read as the coefficients of a
polynomial of degree below ``r``. Its codeword is that polynomial
evaluated at the first ``n`` field elements ``0, 1, ..., n - 1``.
Concatenation with the q x q identity replaces symbol ``beta`` in block
``b`` by a 1 in row ``(b - 1) * q + beta + 1``, which yields an
``q*n x q**r`` binary matrix that is ``floor((n-1)/(r-1))``-disjunct.
Nothing here is materialised unless explicitly requested.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from functools import reduce
from operator import or_
from typing import Callable, List, Optional, Set, Tuple

import numpy as np

from .errors import BudgetExceededError, UsageError
from .gf2m import FieldElement, FieldSpec, evaluate, field_for_size

logger = logging.getLogger(__name__)

DEFAULT_VERIFY_BUDGET = 10**8

EntryFn = Callable[[int, int], int]


@dataclass(frozen=True)
class RSCode:
    """An ``[n, r, n - r + 1]_q`` Reed-Solomon code."""

    spec: FieldSpec
    n: int
    r: int

    def __post_init__(self) -> None:
        if not 1 <= self.r <= self.n < self.spec.q:
            raise UsageError(
                f"need 1 <= r <= n < q, got r={self.r}, n={self.n}, q={self.spec.q}"
            )

    @classmethod
    def from_params(cls, q: int, n: int, r: int) -> "RSCode":
        return cls(field_for_size(q), n, r)

    @property
    def q(self) -> int:
        return self.spec.q

    @property
    def n_items(self) -> int:
        """Number of codewords, q^r."""
        return self.q**self.r

    @property
    def eval_points(self) -> List[FieldElement]:
        return [self.spec.element(x) for x in range(self.n)]

    @property
    def distance(self) -> int:
        return self.n - self.r + 1

    def message(self, col: int) -> List[FieldElement]:
        """Coefficients of the message polynomial of item ``col``."""
        self._check_col(col)
        value = col - 1
        digits = []
        for _ in range(self.r):
            value, digit = divmod(value, self.q)
            digits.append(self.spec.element(digit))
        return digits

    def _check_col(self, col: int) -> None:
        if not 1 <= col <= self.n_items:
            raise UsageError(f"column {col} outside 1..{self.n_items}")

    def _check_pos(self, pos: int) -> None:
        if not 1 <= pos <= self.n:
            raise UsageError(f"position {pos} outside 1..{self.n}")


def codeword_symbol(code: RSCode, col: int, row: int) -> FieldElement:
    """Symbol at position ``row`` of the codeword of item ``col`` (both 1-based)."""
    code._check_pos(row)
    return evaluate(code.message(col), code.spec.element(row - 1))


def symbols(code: RSCode, cols: np.ndarray) -> np.ndarray:
    """Integer symbols of many codewords at once, shape ``(n, len(cols))``.

    Same values as :func:`codeword_symbol`; ``cols`` is 1-based.
    """
    cols = np.asarray(cols, dtype=np.int64)
    if cols.size and (cols.min() < 1 or cols.max() > code.n_items):
        raise UsageError(f"columns must lie in 1..{code.n_items}")
    gf = code.spec.field
    values = cols - 1
    digits = [(values // code.q**k) % code.q for k in range(code.r)]
    points = gf(np.arange(code.n)).reshape(-1, 1)
    acc = gf(np.tile(digits[-1], (code.n, 1)))
    for digit in reversed(digits[:-1]):
        acc = acc * points + gf(digit)
    return np.asarray(acc, dtype=np.int64)


def count_fixed_position(
    code: RSCode, pos: int, alpha: FieldElement, budget: int = DEFAULT_VERIFY_BUDGET
) -> int:
    """Number of codewords carrying ``alpha`` at position ``pos``."""
    code._check_pos(pos)
    if code.n_items > budget:
        raise BudgetExceededError("codeword count", code.n_items, budget)
    count = 0
    for start in range(1, code.n_items + 1, 1 << 16):
        cols = np.arange(start, min(start + (1 << 16), code.n_items + 1))
        row = symbols(code, cols)[pos - 1]
        count += int(np.count_nonzero(row == alpha.value))
    return count


def minimum_distance(code: RSCode, budget: int = DEFAULT_VERIFY_BUDGET) -> int:
    """Exhaustive minimum Hamming distance over all codeword pairs."""
    N = code.n_items
    work = N * (N - 1) // 2 * code.n
    if work > budget:
        raise BudgetExceededError("minimum distance check", work, budget)
    if N < 2:
        return code.n
    table = symbols(code, np.arange(1, N + 1))
    best = code.n
    for i in range(N - 1):
        distances = np.count_nonzero(table[:, i + 1 :] != table[:, i : i + 1], axis=0)
        best = min(best, int(distances.min()))
    return best


@dataclass(frozen=True)
class DisjunctMatrix:
    """Lazy ``h x N`` binary matrix G = C o I."""

    code: RSCode

    @classmethod
    def from_params(cls, q: int, n: int, r: int) -> "DisjunctMatrix":
        return cls(RSCode.from_params(q, n, r))

    @property
    def q(self) -> int:
        return self.code.q

    @property
    def h(self) -> int:
        return self.code.q * self.code.n

    @property
    def n_items(self) -> int:
        return self.code.n_items

    @property
    def d_disjunct(self) -> int:
        if self.code.r == 1:
            return self.n_items - 1
        return (self.code.n - 1) // (self.code.r - 1)

    def split_row(self, i: int) -> Tuple[int, int]:
        """Row ``i`` as (block b in 1..n, slot s in 1..q)."""
        if not 1 <= i <= self.h:
            raise UsageError(f"row {i} outside 1..{self.h}")
        block, slot = divmod(i - 1, self.q)
        return block + 1, slot + 1

    def entry(self, i: int, j: int) -> int:
        block, slot = self.split_row(i)
        return int(codeword_symbol(self.code, j, block).value == slot - 1)

    def column_rows(self, j: int) -> List[int]:
        """Rows holding a 1 in column ``j``: one per block."""
        self.code._check_col(j)
        column = symbols(self.code, np.array([j]))[:, 0]
        return [block * self.q + int(symbol) + 1 for block, symbol in enumerate(column)]

    def row_support(self, i: int) -> np.ndarray:
        """Sorted 1-based columns with a 1 in row ``i``.

        The non-constant message digits are free; the constant digit is
        then fixed by the required symbol, so the row has exactly
        ``q**(r-1)`` ones.
        """
        block, slot = self.split_row(i)
        code = self.code
        gf = code.spec.field
        free = np.arange(code.q ** (code.r - 1), dtype=np.int64)
        x = gf(block - 1)
        acc = gf(np.zeros(free.size, dtype=np.int64))
        for k in range(code.r - 1, 0, -1):
            acc = acc * x + gf((free // code.q ** (k - 1)) % code.q)
        tail = np.asarray(acc * x, dtype=np.int64)
        constant = np.bitwise_xor(tail, slot - 1)
        return 1 + constant + code.q * free

    def row_weight(self, i: int) -> int:
        self.split_row(i)
        return self.code.q ** (self.code.r - 1)

    def materialize(self, budget: int = DEFAULT_VERIFY_BUDGET) -> np.ndarray:
        """Explicit ``h x N`` uint8 matrix."""
        size = self.h * self.n_items
        if size > budget:
            raise BudgetExceededError("disjunct matrix", size, budget)
        table = symbols(self.code, np.arange(1, self.n_items + 1))
        matrix = np.zeros((self.h, self.n_items), dtype=np.uint8)
        offsets = (np.arange(self.code.n) * self.q).reshape(-1, 1)
        matrix[offsets + table, np.arange(self.n_items)] = 1
        return matrix

    def verify(self, d: Optional[int] = None, budget: int = DEFAULT_VERIFY_BUDGET) -> bool:
        return verify_disjunct_matrix(
            self.materialize(budget), self.d_disjunct if d is None else d, budget
        )


def concat_entry(G: DisjunctMatrix, i: int, j: int) -> int:
    """Entry (i, j) of G, both 1-based."""
    return G.entry(i, j)


def _pattern_ints(patterns: np.ndarray) -> Set[int]:
    return {int.from_bytes(patterns[:, col].tobytes(), "big") for col in range(patterns.shape[1])}


def verify_disjunct_matrix(
    matrix: np.ndarray, d: int, budget: int = DEFAULT_VERIFY_BUDGET
) -> bool:
    """True iff no column is covered by the union of ``d`` other columns.

    For each designated column, the other columns are reduced to their
    distinct overlap patterns on its support; the column is covered iff
    at most ``d`` of those patterns OR to the full support.
    """
    if d < 1:
        raise UsageError(f"d must be positive, got {d}")
    matrix = np.asarray(matrix).astype(bool)
    rows, cols = matrix.shape
    others = min(d, cols - 1)
    work = rows * cols
    for j in range(cols):
        support = np.flatnonzero(matrix[:, j])
        if support.size == 0:
            if cols > 1:
                return False
            continue
        rest = np.delete(matrix[support, :], j, axis=1)
        if rest.shape[1] == 0:
            continue
        full = int.from_bytes(np.packbits(np.ones(support.size, dtype=bool)).tobytes(), "big")
        patterns = _pattern_ints(np.unique(np.packbits(rest, axis=0), axis=1))
        patterns.discard(0)
        if full in patterns:
            return False
        maximal = [p for p in patterns if not any(p != o and p & o == p for o in patterns)]
        if not maximal:
            continue
        size = min(others, len(maximal))
        work += math.comb(len(maximal), size)
        if work > budget:
            logger.error("disjunctness check stopped at column %d", j + 1)
            raise BudgetExceededError("disjunctness check", work, budget, "too large to verify")
        for combo in itertools.combinations(maximal, size):
            if reduce(or_, combo) == full:
                logger.debug("column %d covered by %d others", j + 1, size)
                return False
    return True


def verify_disjunct(
    entry_fn: EntryFn, rows: int, cols: int, d: int, budget: int = DEFAULT_VERIFY_BUDGET
) -> bool:
    """Disjunctness oracle over a lazy 1-based entry function."""
    if rows * cols > budget:
        raise BudgetExceededError("disjunctness check", rows * cols, budget, "too large to verify")
    matrix = np.array(
        [[entry_fn(i, j) for j in range(1, cols + 1)] for i in range(1, rows + 1)],
        dtype=np.uint8,
    ).reshape(rows, cols)
    return verify_disjunct_matrix(matrix, d, budget)
