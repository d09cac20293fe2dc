"""File formats: packed outcome files, 0/1 matrix text and result CSVs."""

import csv
import struct
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, TextIO, Union

import numpy as np

from .channel import OutcomeVector
from .errors import FormatError

MAGIC = b"DGT1"
# magic, then t, h, k, c as unsigned 64-bit little-endian integers
HEADER = struct.Struct("<4s4Q")

PathLike = Union[str, Path]


def pack_outcomes(outcomes: OutcomeVector) -> bytes:
    """Header plus bits, bit ``i`` in byte ``i // 8``, least significant bit first."""
    h, k, c = outcomes.layout
    header = HEADER.pack(MAGIC, outcomes.t, h, k, c)
    return header + np.packbits(outcomes.bits, bitorder="little").tobytes()


def unpack_outcomes(payload: bytes) -> OutcomeVector:
    if len(payload) < HEADER.size:
        raise FormatError(f"outcome file shorter than its {HEADER.size}-byte header")
    magic, t, h, k, c = HEADER.unpack_from(payload)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if h * k * c != t:
        raise FormatError(f"header layout {h} x {k} x {c} does not multiply to t = {t}")
    body = np.frombuffer(payload, dtype=np.uint8, offset=HEADER.size)
    if body.size != (t + 7) // 8:
        raise FormatError(f"expected {(t + 7) // 8} payload bytes, found {body.size}")
    bits = np.unpackbits(body, count=t, bitorder="little")
    return OutcomeVector(bits, (h, k, c))


def write_outcomes(path: PathLike, outcomes: OutcomeVector) -> None:
    Path(path).write_bytes(pack_outcomes(outcomes))


def read_outcomes(path: PathLike) -> OutcomeVector:
    return unpack_outcomes(Path(path).read_bytes())


def matrix_lines(rows: Iterable[Sequence[int]]) -> Iterable[str]:
    """One ``'0'/'1'`` string per matrix row."""
    for row in rows:
        yield "".join("1" if bit else "0" for bit in row)


def write_matrix(stream: TextIO, rows: Iterable[Sequence[int]]) -> int:
    """Write rows as 0/1 text, returning the number of rows written."""
    count = 0
    for line in matrix_lines(rows):
        stream.write(line + "\n")
        count += 1
    return count


def parse_matrix(text: str) -> np.ndarray:
    """Inverse of :func:`write_matrix`."""
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        return np.zeros((0, 0), dtype=np.uint8)
    if len({len(line) for line in lines}) != 1 or set("".join(lines)) - {"0", "1"}:
        raise FormatError("matrix text must be equal-length rows of 0 and 1")
    return np.array([[int(ch) for ch in line] for line in lines], dtype=np.uint8)


def write_csv(path: PathLike, rows: List[Dict[str, Any]], fieldnames: Sequence[str]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(fieldnames), extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
