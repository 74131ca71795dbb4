"""Exact rational and extended-rational arithmetic.

Finite values are :class:`fractions.Fraction`; the extended line adds the two
infinities.  Nothing in the library ever rounds.
"""
from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Union

__all__ = [
    "ExtendedRational",
    "INF",
    "NEG_INF",
    "UNDEFINED",
    "Undefined",
    "UndefinedArithmetic",
    "ext",
    "ext_add",
    "ext_mul",
    "parse_rational",
    "parse_extended",
    "format_rational",
]


class UndefinedArithmetic(ArithmeticError):
    """Raised by the ``+`` operator on ``inf + (-inf)``."""


class Undefined:
    """Result of an ill-posed extended sum.  Singleton: use ``UNDEFINED``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNDEFINED"

    def __bool__(self):
        return False


UNDEFINED = Undefined()

Number = Union[int, Fraction, "ExtendedRational"]


class ExtendedRational:
    """A rational number or one of +inf / -inf.

    >>> ExtendedRational(Fraction(1, 2)) + 1
    ExtendedRational('3/2')
    >>> ExtendedRational.infinity(-1) * 0
    ExtendedRational('0')
    """

    __slots__ = ("_q", "_inf")

    def __init__(self, value: int | Fraction | str | ExtendedRational = 0):
        if isinstance(value, ExtendedRational):
            self._q, self._inf = value._q, value._inf
        elif isinstance(value, str):
            other = parse_extended(value)
            self._q, self._inf = other._q, other._inf
        elif isinstance(value, (int, Rational)) and not isinstance(value, bool):
            self._q, self._inf = Fraction(value), 0
        else:
            raise TypeError(f"cannot build an extended rational from {value!r}")

    @classmethod
    def infinity(cls, sign: int = 1) -> ExtendedRational:
        out = cls.__new__(cls)
        out._q, out._inf = None, 1 if sign > 0 else -1
        return out

    @property
    def is_finite(self) -> bool:
        return self._inf == 0

    @property
    def is_infinite(self) -> bool:
        return self._inf != 0

    @property
    def sign(self) -> int:
        if self._inf:
            return self._inf
        return (self._q > 0) - (self._q < 0)

    @property
    def finite(self) -> Fraction:
        """The rational value; raises ``ValueError`` on an infinity."""
        if self._inf:
            raise ValueError(f"{self} is not finite")
        return self._q

    # arithmetic -------------------------------------------------------

    def __neg__(self) -> ExtendedRational:
        if self._inf:
            return ExtendedRational.infinity(-self._inf)
        return ExtendedRational(-self._q)

    def __abs__(self) -> ExtendedRational:
        return -self if self.sign < 0 else self

    def __add__(self, other: Number) -> ExtendedRational:
        out = ext_add(self, other)
        if out is UNDEFINED:
            raise UndefinedArithmetic(f"{self} + {ext(other)} is undefined")
        return out

    __radd__ = __add__

    def __sub__(self, other: Number) -> ExtendedRational:
        return self + (-ext(other))

    def __rsub__(self, other: Number) -> ExtendedRational:
        return ext(other) + (-self)

    def __mul__(self, other: Number) -> ExtendedRational:
        return ext_mul(self, other)

    __rmul__ = __mul__

    # ordering ---------------------------------------------------------

    def _key(self):
        return (self._inf, self._q if self._q is not None else 0)

    def __eq__(self, other):
        try:
            other = ext(other)
        except TypeError:
            return NotImplemented
        return self._inf == other._inf and self._q == other._q

    def __lt__(self, other):
        return self._key() < ext(other)._key()

    def __le__(self, other):
        return self._key() <= ext(other)._key()

    def __gt__(self, other):
        return self._key() > ext(other)._key()

    def __ge__(self, other):
        return self._key() >= ext(other)._key()

    def __hash__(self):
        return hash(self._q) if not self._inf else hash(("inf", self._inf))

    def __repr__(self):
        return f"ExtendedRational({str(self)!r})"

    def __str__(self):
        if self._inf:
            return "inf" if self._inf > 0 else "-inf"
        return format_rational(self._q)


INF = ExtendedRational.infinity(1)
NEG_INF = ExtendedRational.infinity(-1)


def ext(value: Number) -> ExtendedRational:
    """Coerce ints, fractions and strings to :class:`ExtendedRational`."""
    if isinstance(value, ExtendedRational):
        return value
    return ExtendedRational(value)


def ext_add(a: Number, b: Number) -> ExtendedRational | Undefined:
    """Extended sum; opposite infinities give ``UNDEFINED`` instead of raising."""
    a, b = ext(a), ext(b)
    if a._inf and b._inf:
        return a if a._inf == b._inf else UNDEFINED
    if a._inf:
        return a
    if b._inf:
        return b
    return ExtendedRational(a._q + b._q)


def ext_mul(a: Number, b: Number) -> ExtendedRational:
    """Extended product with the convention 0 * (+-inf) = 0."""
    a, b = ext(a), ext(b)
    if a.sign == 0 or b.sign == 0:
        return ExtendedRational(0)
    if a._inf or b._inf:
        return ExtendedRational.infinity(a.sign * b.sign)
    return ExtendedRational(a._q * b._q)


_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q`` or ``p`` with an optional sign.  Decimals are rejected."""
    m = _RATIONAL_RE.match(text)
    if not m:
        raise ValueError(f"not a rational literal: {text!r}")
    num, den = m.group(1), m.group(2)
    if den is not None and int(den) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def parse_extended(text: str) -> ExtendedRational:
    t = text.strip().lower()
    if t in ("inf", "+inf"):
        return INF
    if t == "-inf":
        return NEG_INF
    return ExtendedRational(parse_rational(t))


def format_rational(q: Fraction | int) -> str:
    return str(Fraction(q))
