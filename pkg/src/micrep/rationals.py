"""Exact rational scalars.

Every number in the package is a `fractions.Fraction`: arbitrary-precision
numerator, positive denominator, always in lowest terms.  No floating point
enters any computation; parsing accepts only `p/q` literals.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

Rational = Fraction

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def rational(value) -> Fraction:
    """Coerce ints, strings of the form ``p/q`` and Fractions to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"not an exact rational: {value!r}")


def parse_rational(text: str) -> Fraction:
    """Parse a ``p/q`` literal; decimals are rejected to keep exactness."""
    text = text.strip()
    if not _RATIONAL_RE.match(text):
        raise ValueError(f"invalid rational literal {text!r} (use p or p/q)")
    return Fraction(text)


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def rational_ceil(value: Fraction) -> int:
    return math.ceil(value)


def rational_floor(value: Fraction) -> int:
    return math.floor(value)
