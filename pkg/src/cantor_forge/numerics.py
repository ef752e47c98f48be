"""Exact dyadic rationals ``m / 2**e``.

Every endpoint, radius and offset in the package is a :class:`Dyadic`.
Values are immutable and kept in canonical form (``e == 0`` or ``m`` odd),
so structural equality is value equality.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

__all__ = [
    "Dyadic",
    "INFINITY",
    "ONE",
    "ZERO",
    "dyadic",
    "dyadic_add",
    "dyadic_affine",
    "format_extended",
    "parse_extended",
    "pow2",
]

#: Marker for an unbounded distance or rank.
INFINITY = math.inf

_TEXT = re.compile(r"^\s*(-?\d+)(?:\s*/\s*2\^(\d+))?\s*$")


class Dyadic:
    """An exact binary rational ``mantissa / 2**exponent``."""

    __slots__ = ("_m", "_e")

    def __init__(self, mantissa: int = 0, exponent: int = 0) -> None:
        if not isinstance(mantissa, int) or not isinstance(exponent, int):
            raise TypeError("mantissa and exponent must be integers")
        if exponent < 0:
            mantissa <<= -exponent
            exponent = 0
        if mantissa == 0:
            exponent = 0
        elif exponent:
            tz = (mantissa & -mantissa).bit_length() - 1
            k = min(tz, exponent)
            mantissa >>= k
            exponent -= k
        self._m = mantissa
        self._e = exponent

    @property
    def mantissa(self) -> int:
        return self._m

    @property
    def exponent(self) -> int:
        return self._e

    # construction -------------------------------------------------------

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        """Parse ``"m/2^e"``, an integer ``"m"`` or a fraction ``"p/q"`` with ``q`` a power of two."""
        match = _TEXT.match(text)
        if match is not None:
            return cls(int(match.group(1)), int(match.group(2) or 0))
        try:
            value = Fraction(text.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not a dyadic literal: {text!r}") from None
        return cls.from_fraction(value)

    @classmethod
    def from_fraction(cls, value: Fraction) -> "Dyadic":
        den = value.denominator
        if den & (den - 1):
            raise ValueError(f"{value} is not dyadic")
        return cls(value.numerator, den.bit_length() - 1)

    def to_fraction(self) -> Fraction:
        return Fraction(self._m, 1 << self._e)

    # arithmetic ---------------------------------------------------------

    def _align(self, other: "Dyadic") -> tuple[int, int, int]:
        e = max(self._e, other._e)
        return self._m << (e - self._e), other._m << (e - other._e), e

    def __add__(self, other: object) -> "Dyadic":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, e = self._align(other)
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __sub__(self, other: object) -> "Dyadic":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, e = self._align(other)
        return Dyadic(a - b, e)

    def __rsub__(self, other: object) -> "Dyadic":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other: object) -> "Dyadic":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Dyadic(self._m * other._m, self._e + other._e)

    __rmul__ = __mul__

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self._m, self._e)

    def __pos__(self) -> "Dyadic":
        return self

    def __abs__(self) -> "Dyadic":
        return self if self._m >= 0 else -self

    def shift(self, k: int) -> "Dyadic":
        """Multiply by ``2**k`` (``k`` may be negative)."""
        return Dyadic(self._m, self._e - k)

    def reciprocal(self) -> "Dyadic":
        """Exact inverse; only defined for ``±2**k``."""
        m = abs(self._m)
        if m == 0 or m & (m - 1):
            raise ZeroDivisionError(f"{self} has no dyadic reciprocal")
        k = m.bit_length() - 1
        sign = -1 if self._m < 0 else 1
        return Dyadic(sign, k - self._e)

    def is_power_of_two(self) -> bool:
        """True for ``±2**k``, any integer ``k``."""
        m = abs(self._m)
        return m != 0 and not (m & (m - 1))

    def log2_floor(self) -> int:
        """``floor(log2(|x|))`` for nonzero ``x``."""
        if self._m == 0:
            raise ValueError("log2 of zero")
        return abs(self._m).bit_length() - 1 - self._e

    # comparison ---------------------------------------------------------

    def _cmp(self, other: object):
        if isinstance(other, float) and math.isinf(other):
            return -1 if other > 0 else 1
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, _ = self._align(other)
        return (a > b) - (a < b)

    def __eq__(self, other: object) -> bool:
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c == 0

    def __lt__(self, other: object) -> bool:
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c < 0

    def __le__(self, other: object) -> bool:
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c <= 0

    def __gt__(self, other: object) -> bool:
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c > 0

    def __ge__(self, other: object) -> bool:
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c >= 0

    def __hash__(self) -> int:
        return hash(self._m) if self._e == 0 else hash((self._m, self._e))

    def __bool__(self) -> bool:
        return self._m != 0

    def __float__(self) -> float:
        return math.ldexp(self._m, -self._e) if abs(self._m).bit_length() < 1000 else float(self.to_fraction())

    # text ---------------------------------------------------------------

    def __str__(self) -> str:
        return str(self._m) if self._e == 0 else f"{self._m}/2^{self._e}"

    def __repr__(self) -> str:
        return f"Dyadic({self})"

    def __reduce__(self):
        return (Dyadic, (self._m, self._e))


def _coerce(value: object) -> Dyadic:
    if isinstance(value, Dyadic):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Dyadic(value)
    if isinstance(value, Fraction):
        return Dyadic.from_fraction(value)
    return NotImplemented


Number = Union[Dyadic, int]

ZERO = Dyadic(0)
ONE = Dyadic(1)


def dyadic(value: Number | str | Fraction) -> Dyadic:
    """Coerce ints, fractions and text literals to :class:`Dyadic`."""
    if isinstance(value, str):
        return Dyadic.parse(value)
    result = _coerce(value)
    if result is NotImplemented:
        raise TypeError(f"cannot convert {value!r} to Dyadic")
    return result


def pow2(k: int) -> Dyadic:
    """``2**k`` for any integer ``k``."""
    return Dyadic(1, -k)


def dyadic_add(a: Dyadic, b: Dyadic) -> Dyadic:
    return a + b


def dyadic_affine(x: Dyadic, scale: Dyadic, offset: Dyadic) -> Dyadic:
    """``scale * x + offset``, exactly; ``scale`` may be negative."""
    return scale * x + offset


def format_extended(value: Dyadic | float) -> str:
    """Text form that also covers the ``+inf`` marker."""
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return str(value)


def parse_extended(text: str) -> Dyadic | float:
    return INFINITY if text.strip() == "inf" else Dyadic.parse(text)
