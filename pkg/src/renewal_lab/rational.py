"""Parsing and formatting of exact rationals as ``"num/den"`` strings."""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Union

from renewal_lab.errors import InvalidRational

RationalLike = Union[Fraction, int, str]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(value: RationalLike) -> Fraction:
    """Return ``value`` as a Fraction.

    Strings must look like ``"3"``, ``"-3"`` or ``"3/4"``. Decimal strings and
    floats are rejected: every probability in this package is exact.
    """
    if isinstance(value, bool):
        raise InvalidRational(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        match = _RATIONAL_RE.match(value)
        if match is None:
            raise InvalidRational(f"not an exact rational: {value!r}")
        num, den = match.groups()
        if den is not None and int(den) == 0:
            raise InvalidRational(f"zero denominator: {value!r}")
        return Fraction(int(num), int(den) if den is not None else 1)
    raise InvalidRational(f"not an exact rational: {value!r}")


def format_rational(value: Fraction | int) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational_list(text: str) -> list[Fraction]:
    """Parse a comma separated list such as ``"1/2,1/4,1/4"``."""
    parts = [part for part in text.split(",")]
    if not parts or any(not part.strip() for part in parts):
        raise InvalidRational(f"empty entry in rational list: {text!r}")
    return [parse_rational(part) for part in parts]


def format_rational_list(values: Iterable[Fraction]) -> list[str]:
    return [format_rational(v) for v in values]
