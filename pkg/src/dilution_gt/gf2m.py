"""Arithmetic in GF(2^m), the symbol field of the Reed-Solomon codes.

Elements are mapped to integers bit by bit: bit ``i`` of the integer is
the coefficient of ``x**i``. Every field uses a fixed canonical modulus,
the lexicographically least irreducible polynomial of degree ``m``, so
that matrix entries are reproducible.

Scalar operations go through :class:`FieldElement`; bulk evaluation uses
the ``galois`` field class exposed as :attr:`FieldSpec.field`.
"""

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Any, Iterator, List

import galois

from .errors import DomainError, UsageError

MAX_DEGREE = 16


@dataclass(frozen=True)
class FieldSpec:
    """GF(2^m) with a bit-encoded irreducible modulus of degree ``m``."""

    m: int
    modulus: int

    def __post_init__(self) -> None:
        if not 1 <= self.m <= MAX_DEGREE:
            raise UsageError(f"extension degree must be in 1..{MAX_DEGREE}, got {self.m}")
        if self.modulus.bit_length() - 1 != self.m:
            raise UsageError(f"modulus {self.modulus:#x} does not have degree {self.m}")
        if not galois.Poly.Int(self.modulus).is_irreducible():
            raise UsageError(f"modulus {self.modulus:#x} is reducible over GF(2)")

    @property
    def q(self) -> int:
        """Field size 2^m."""
        return 1 << self.m

    @cached_property
    def field(self) -> Any:
        """The ``galois`` FieldArray subclass for this field."""
        if self.m == 1:
            return galois.GF(2)
        return galois.GF(self.q, irreducible_poly=self.modulus)

    def element(self, value: int) -> "FieldElement":
        return FieldElement(int(value), self)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(1, self)

    def elements(self) -> Iterator["FieldElement"]:
        for value in range(self.q):
            yield FieldElement(value, self)

    def __str__(self) -> str:
        return f"GF(2^{self.m}) mod {galois.Poly.Int(self.modulus)}"


@dataclass(frozen=True)
class FieldElement:
    """An element of a :class:`FieldSpec`, stored as its integer encoding."""

    value: int
    spec: FieldSpec = field(repr=False)

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.spec.q:
            raise UsageError(f"{self.value} is not an element of GF({self.spec.q})")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return add(self, other)

    __sub__ = __add__

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return mul(self, other)

    def __pow__(self, exponent: int) -> "FieldElement":
        return power(self, exponent)

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0


@lru_cache(maxsize=None)
def canonical_modulus(m: int) -> int:
    """Lexicographically least irreducible polynomial of degree ``m`` over GF(2)."""
    if not 1 <= m <= MAX_DEGREE:
        raise UsageError(f"extension degree must be in 1..{MAX_DEGREE}, got {m}")
    return int(galois.irreducible_poly(2, m, method="min"))


@lru_cache(maxsize=None)
def canonical_field(m: int) -> FieldSpec:
    """The :class:`FieldSpec` used throughout the package for GF(2^m)."""
    return FieldSpec(m, canonical_modulus(m))


def field_for_size(q: int) -> FieldSpec:
    """Canonical field of size ``q``; ``q`` must be a power of two."""
    if q < 2 or q & (q - 1):
        raise UsageError(f"field size must be a power of 2, got {q}")
    return canonical_field(q.bit_length() - 1)


def _same_field(a: FieldElement, b: FieldElement) -> None:
    if a.spec != b.spec:
        raise UsageError(f"cannot combine elements of {a.spec} and {b.spec}")


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    """Characteristic-2 addition: XOR of the coefficient bits."""
    _same_field(a, b)
    return FieldElement(a.value ^ b.value, a.spec)


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    """Polynomial product reduced modulo the field's modulus."""
    _same_field(a, b)
    gf = a.spec.field
    return FieldElement(int(gf(a.value) * gf(b.value)), a.spec)


def inv(a: FieldElement) -> FieldElement:
    if a.value == 0:
        raise DomainError("zero has no multiplicative inverse")
    gf = a.spec.field
    return FieldElement(int(gf(a.value) ** -1), a.spec)


def power(a: FieldElement, exponent: int) -> FieldElement:
    """``a`` raised to a non-negative integer power; ``power(0, 0)`` is 1."""
    if exponent < 0:
        raise UsageError(f"exponent must be non-negative, got {exponent}")
    if exponent == 0:
        return a.spec.one
    gf = a.spec.field
    return FieldElement(int(gf(a.value) ** exponent), a.spec)


def evaluate(coefficients: List[FieldElement], point: FieldElement) -> FieldElement:
    """Horner evaluation; ``coefficients[i]`` multiplies ``x**i``."""
    result = point.spec.zero
    for coefficient in reversed(coefficients):
        result = add(mul(result, point), coefficient)
    return result
