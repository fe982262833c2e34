"""Exact dyadic rationals k/2^m in [0, 1] and the literal syntax the CLI accepts."""

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Optional, Union

from utils.errors import AlignmentException, DomainException

_POWER_DENOMINATOR = re.compile(r"^\s*([+-]?\d+)\s*/\s*2\s*(?:\^|\*\*)\s*(\d+)\s*$")
_PLAIN_FRACTION = re.compile(r"^\s*([+-]?\d+)\s*/\s*(\d+)\s*$")


@total_ordering
@dataclass(frozen=True)
class DyadicTime:
    """A time k/2^m in [0, 1], always stored in lowest terms."""

    numerator: int
    level: int

    def __post_init__(self):
        if self.level < 0:
            raise DomainException("level", self.level, "level >= 0")
        if not 0 <= self.numerator <= (1 << self.level):
            raise DomainException(
                "dyadic time", f"{self.numerator}/2^{self.level}", "0 <= k <= 2^m"
            )
        k, m = self.numerator, self.level
        while m > 0 and k % 2 == 0:
            k //= 2
            m -= 1
        object.__setattr__(self, "numerator", k)
        object.__setattr__(self, "level", m)

    @classmethod
    def from_fraction(cls, value: Fraction) -> "DyadicTime":
        value = Fraction(value)
        den = value.denominator
        if den & (den - 1):
            raise DomainException("dyadic time", value, "denominator a power of two")
        return cls(value.numerator, den.bit_length() - 1)

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.level)

    def __float__(self) -> float:
        return self.numerator / (1 << self.level)

    def index_at(self, n: int) -> int:
        """Grid index of this time on the level-n grid of [0, 1]."""
        if self.level > n:
            raise AlignmentException(str(self), n)
        return self.numerator << (n - self.level)

    def __sub__(self, other: "DyadicTime") -> "DyadicTime":
        return DyadicTime.from_fraction(self.value - other.value)

    def __lt__(self, other: "DyadicTime") -> bool:
        return self.value < other.value

    def __str__(self) -> str:
        if self.level == 0:
            return str(self.numerator)
        return f"{self.numerator}/{1 << self.level}"


def as_dyadic(value: Union["DyadicTime", Fraction, int, float, str]) -> DyadicTime:
    """Coerces the common spellings of a dyadic time."""
    if isinstance(value, DyadicTime):
        return value
    if isinstance(value, str):
        return parse_dyadic(value)
    return DyadicTime.from_fraction(Fraction(value))


def parse_dyadic(text: str, max_level: Optional[int] = None) -> DyadicTime:
    """
    Parses `k/2^m`, `k/2**m`, `k/N` (N a power of two) or an exact binary decimal.

    Raises:
        DomainException: if the literal is malformed or not dyadic.
        AlignmentException: if the reduced level exceeds `max_level`.
    """
    match = _POWER_DENOMINATOR.match(text)
    try:
        if match:
            value = Fraction(int(match.group(1)), 1 << int(match.group(2)))
        else:
            match = _PLAIN_FRACTION.match(text)
            if match:
                value = Fraction(int(match.group(1)), int(match.group(2)))
            else:
                value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise DomainException("dyadic literal", text, "k/2^m syntax")

    if value.denominator & (value.denominator - 1):
        raise DomainException("dyadic literal", text, "exact k/2^m value")
    if not 0 <= value <= 1:
        raise DomainException("dyadic literal", text, "0 <= value <= 1")

    result = DyadicTime.from_fraction(value)
    if max_level is not None and result.level > max_level:
        raise AlignmentException(text, max_level)
    return result
