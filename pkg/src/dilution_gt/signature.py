"""The signature matrix M and its masked form B = M x diag(g).

Column ``j`` of M stacks the ``log2(N)``-bit representation of ``j - 1``
(most significant bit in row 1) over its bitwise complement, so every
column has weight ``log2(N)`` and a weight-``log2(N)`` outcome vector
names exactly one item.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import UsageError


def log2_items(n_items: int) -> int:
    """``log2(N)`` for a power-of-two item count ``N >= 2``."""
    if n_items < 2 or n_items & (n_items - 1):
        raise UsageError(f"number of items must be a power of 2 (>= 2), got {n_items}")
    return n_items.bit_length() - 1


@dataclass(frozen=True)
class SignatureMatrix:
    """Lazy ``k x N`` matrix with ``k = 2 * log2(N)``."""

    n_items: int

    def __post_init__(self) -> None:
        log2_items(self.n_items)

    @property
    def log_n(self) -> int:
        return log2_items(self.n_items)

    @property
    def k(self) -> int:
        return 2 * self.log_n

    def entry(self, i: int, j: int) -> int:
        return m_entry(self.n_items, i, j)

    def columns(self, cols: np.ndarray) -> np.ndarray:
        """Columns ``cols`` (1-based) as a ``k x len(cols)`` uint8 array."""
        cols = np.asarray(cols, dtype=np.int64)
        if cols.size and (cols.min() < 1 or cols.max() > self.n_items):
            raise UsageError(f"columns must lie in 1..{self.n_items}")
        shifts = np.arange(self.log_n - 1, -1, -1, dtype=np.int64).reshape(-1, 1)
        upper = ((cols - 1) >> shifts) & 1
        return np.vstack([upper, 1 - upper]).astype(np.uint8)

    def column(self, j: int) -> np.ndarray:
        return self.columns(np.array([j]))[:, 0]

    def materialize(self) -> np.ndarray:
        return self.columns(np.arange(1, self.n_items + 1))


def m_entry(n_items: int, i: int, j: int) -> int:
    """Entry (i, j) of M, both 1-based."""
    log_n = log2_items(n_items)
    if not 1 <= i <= 2 * log_n:
        raise UsageError(f"row {i} outside 1..{2 * log_n}")
    if not 1 <= j <= n_items:
        raise UsageError(f"column {j} outside 1..{n_items}")
    if i > log_n:
        return 1 - m_entry(n_items, i - log_n, j)
    return ((j - 1) >> (log_n - i)) & 1


def b_entry(n_items: int, mask: Sequence[int], i: int, j: int) -> int:
    """Entry (i, j) of B = M x diag(mask)."""
    if len(mask) != n_items:
        raise UsageError(f"mask has length {len(mask)}, expected {n_items}")
    return m_entry(n_items, i, j) & int(mask[j - 1])


def decode_signature(bits: Sequence[int], n_items: int, strict: bool = False) -> Optional[int]:
    """Item whose column of M equals ``bits``, or None.

    Only the weight is checked unless ``strict`` is set, in which case the
    lower half must also be the complement of the upper half.
    """
    log_n = log2_items(n_items)
    vector = np.asarray(bits, dtype=np.uint8).ravel()
    if vector.size != 2 * log_n:
        raise UsageError(f"signature has length {vector.size}, expected {2 * log_n}")
    if int(vector.sum()) != log_n:
        return None
    upper, lower = vector[:log_n], vector[log_n:]
    if strict and np.any(upper == lower):
        return None
    index = 0
    for bit in upper:
        index = (index << 1) | int(bit)
    return index + 1
